#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "adoptsub/scenario/config.hpp"
#include "adoptsub/subsidy.hpp"

namespace adoptsub::scenario {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitInvalidInput = 2,
  kExitAssumptionViolated = 3,
};

// Verbs. Each writes its CSV to `csv` and a short human summary to `summary`.

void cmd_equilibria(const ScenarioConfig& config, std::ostream& csv, std::ostream& summary);
void cmd_simulate(const ScenarioConfig& config, std::ostream& csv, std::ostream& summary);
void cmd_sweep(const ScenarioConfig& config, std::ostream& csv, std::ostream& summary);
void cmd_full_subsidy(const ScenarioConfig& config, std::ostream& csv, std::ostream& summary);
void cmd_noext(const ScenarioConfig& config, std::ostream& csv, std::ostream& summary);

/// Closed form against the numerical oracle for the configured scenario.
/// Returns true when every check is within tolerance.
bool cmd_validate(const ScenarioConfig& config, std::ostream& report);

/// Writes the data files for example 1..4 into `dir` and returns their paths.
/// Throws ConfigError for any other id.
std::vector<std::filesystem::path> cmd_reproduce(int example_id, const std::filesystem::path& dir,
                                                 std::ostream& summary);

/// Sweep rows as CSV `s,s_over_e,feasible,T_hat,S,regime,method,frontier`.
void write_sweep_csv(const SweepResult& result, std::ostream& csv);

/// Full command line without the program name. Output directory comes from
/// --out-dir, else ADOPTSUB_OUTPUT_DIR, else the working directory.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adoptsub::scenario
