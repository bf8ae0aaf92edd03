#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adoptsub/model_params.hpp"

namespace adoptsub::scenario {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SubsidyKind { kNone, kCls, kFull, kMinDuration };

std::string_view to_string(SubsidyKind kind);

// Flat `key = value` scenario file. See tools/scenario_reference.cfg for the
// full key list.
struct ScenarioConfig {
  ModelParams model;
  double t0 = 0.0;
  double x0 = 0.0;

  SubsidyKind kind = SubsidyKind::kNone;
  std::optional<double> level;     // subsidy.s
  std::optional<double> duration;  // subsidy.T

  std::optional<double> t_end;        // run.t_end, default t0 + 20/gamma
  std::optional<double> sample_step;  // run.dt, output spacing
  std::optional<double> oracle_step;  // run.step, RK4 step for validate
  int grid = 512;                     // run.grid
  std::optional<double> s_min;        // run.s_min (noext)
  std::optional<double> s_max;        // run.s_max (noext)
  std::optional<double> target;       // noext.target

  std::string output;  // CSV file name; empty writes to stdout

  [[nodiscard]] double end_time() const;
  [[nodiscard]] double output_step() const;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError with
/// the source name and line number.
ScenarioConfig parse_config(std::istream& in, std::string_view source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Applies one `key=value` override.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);
void apply_override(ScenarioConfig& config, std::string_view assignment);

/// Model invariants plus run-block sanity (t_end > t0, positive steps,
/// x0 in [0, 1], grid >= 2) and kind-specific required fields.
void validate(const ScenarioConfig& config);

/// Keys understood by parse_config, in documentation order.
const std::vector<std::string_view>& known_keys();

}  // namespace adoptsub::scenario
