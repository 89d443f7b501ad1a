#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergolab/grid_measures.hpp"
#include "ergolab/phase_maps.hpp"

namespace ergolab {

/// Malformed configuration: unreadable file, bad JSON, wrong types, unknown
/// keys or unknown enum values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitInvariant = 3,
  kExitBudget = 4,
  kExitNumerical = 5,
};

inline constexpr std::string_view kSchemaVersion = "ergolab/1";

struct BundledScenario {
  std::string_view name;
  std::string_view json;
};

/// Scenario files compiled into the library (generated at build time).
const std::vector<BundledScenario>& bundled_scenarios();

struct TaskSpec {
  std::string id;
  std::string type;
  /// Task parameters with every default filled in.
  nlohmann::json params;
};

struct Scenario {
  std::string name;
  std::string description;
  IFSystem ifs;
  Grid grid;
  std::uint64_t seed = 0;
  std::vector<TaskSpec> tasks;
  /// Canonical form of the whole config with defaults expanded; embedded in
  /// every report.
  nlohmann::json resolved;
};

/// Parses and validates a config document.  Throws ConfigError for format
/// problems and InvariantViolation for maps or probabilities that break
/// their family invariants.
Scenario parse_scenario(const nlohmann::json& config);

/// Reads `source` as a file path, or as a bundled scenario name when no such
/// file exists.
Scenario load_scenario(const std::string& source);

/// Parameter defaults of every task type, as documented in the README.
const nlohmann::json& task_defaults();

struct RunOptions {
  std::filesystem::path out;
  /// Overrides the scenario's root seed.
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  /// Echoes one progress line per task to stderr.
  bool verbose = false;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
};

/// Executes the tasks in order, writing `<task>.json` reports, CSV side
/// files, summary.json and metadata.json (the only file with timestamps or
/// thread counts).  Budget exhaustion in one task is recorded and later
/// tasks still run; the exit code reports the most severe outcome.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// Maps an exception escaping parse/validate/run to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace ergolab
