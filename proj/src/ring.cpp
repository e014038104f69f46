#include "kcell/ring.hpp"

#include "kcell/errors.hpp"

namespace kcell {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::CoefficientMismatch: return "CoefficientMismatch";
    case ErrorCode::NotAComplex: return "NotAComplex";
    case ErrorCode::NotAGroup: return "NotAGroup";
    case ErrorCode::NotNilpotentGroup: return "NotNilpotentGroup";
    case ErrorCode::BadSubgroup: return "BadSubgroup";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::WrongGroupClass: return "WrongGroupClass";
    case ErrorCode::WrongCharacteristic: return "WrongCharacteristic";
    case ErrorCode::NotNilpotentAction: return "NotNilpotentAction";
    case ErrorCode::NoStrategyApplies: return "NoStrategyApplies";
    case ErrorCode::UnsupportedGroup: return "UnsupportedGroup";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::BadAction: return "BadAction";
  }
  return "Unknown";
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<Integer> prime_factors(Integer n) {
  std::vector<Integer> out;
  n = abs(n);
  for (Integer d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

Ring Ring::prime_field(std::uint64_t p) {
  require(is_prime(p), ErrorCode::InvalidInput, "field characteristic " + std::to_string(p) + " is not prime");
  return Ring{p};
}

bool Ring::is_unit(const Integer& x) const {
  if (p == 0) return x == 1 || x == -1;
  return reduced(x) != 0;
}

Integer Ring::inverse(const Integer& x) const {
  if (p == 0) {
    require(is_unit(x), ErrorCode::InvalidInput, "integer is not a unit");
    return x;
  }
  Integer r;
  Integer a = reduced(x);
  Integer m = p;
  require(a != 0, ErrorCode::InvalidInput, "zero has no inverse");
  mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

std::string Ring::name() const { return p == 0 ? std::string("Z") : "F" + std::to_string(p); }

}  // namespace kcell
