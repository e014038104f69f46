#pragma once

#include <stdexcept>
#include <string>

namespace kcell {

enum class ErrorCode {
  InvalidInput,
  CoefficientMismatch,
  NotAComplex,
  NotAGroup,
  NotNilpotentGroup,
  BadSubgroup,
  BadWindow,
  NotStabilized,
  TooLarge,
  WrongGroupClass,
  WrongCharacteristic,
  NotNilpotentAction,
  NoStrategyApplies,
  UnsupportedGroup,
  CapExceeded,
  BadAction,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the cellular strategies when none of the proven cases covers the
/// input. `witness` names the obstruction, e.g. a non-nilpotent homology module.
class NoStrategyApplies : public Error {
 public:
  NoStrategyApplies(const std::string& what, std::string witness)
      : Error(ErrorCode::NoStrategyApplies, what), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace kcell
