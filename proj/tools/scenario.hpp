#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kcell/emss.hpp"
#include "kcell/errors.hpp"

namespace kcell::cli {

using json = nlohmann::json;

inline constexpr const char* kScenarioSchema = "kcell-scenario/1";
inline constexpr const char* kReportSchema = "kcell-report/1";
inline constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kInputError = 1, kMismatch = 2, kNoStrategy = 3 };

/// Command-line flags that take precedence over the scenario file.
struct Overrides {
  std::optional<CellRange> range;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> task;
};

struct Outcome {
  json report;
  int exit_code = kOk;
};

Outcome run_scenario(const json& scenario, const Overrides& o = {});
/// Parses and runs one file; parse errors become exit 1 with an error report.
Outcome run_file(const std::string& path, const Overrides& o = {});

/// Built-in groups, presentations, models, modules and tasks. Presentations
/// are validated against Ext on load; `all_valid` reports the outcome.
json builtin_catalog(bool* all_valid);

/// One "path<TAB>value" line per leaf.
std::string to_tsv(const json& j);

/// "a:b" -> range; throws InvalidInput.
CellRange parse_range(const std::string& s);

const std::vector<std::string>& task_names();

// Parsers shared with the tests.
Ring parse_ring(const json& j);
GroupPtr parse_group(const json& j);
GModule parse_module(const json& j, const GroupPtr& g, Ring ring);
GComplex parse_complex(const json& j, const GroupPtr& g, Ring ring);
GSimplicialComplex parse_space(const json& j, const GroupPtr& g);

/// Paths where `expected` is not a subset of `actual`.
std::vector<std::string> expectation_mismatches(const json& expected, const json& actual);

}  // namespace kcell::cli
