#include "adoptsub/scenario/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "adoptsub/errors.hpp"

namespace adoptsub::scenario {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_scalar(std::string_view text, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

// Decimal, or a fraction such as 1/3.
double parse_number(std::string_view text, std::string_view key) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_scalar(text, key);
  const double den = parse_scalar(text.substr(slash + 1), key);
  if (den == 0.0) throw ConfigError("zero denominator for " + std::string(key));
  return parse_scalar(text.substr(0, slash), key) / den;
}

int parse_int(std::string_view text, std::string_view key) {
  text = trim(text);
  int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("invalid integer '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

SubsidyKind parse_kind(std::string_view text) {
  text = trim(text);
  if (text == "none") return SubsidyKind::kNone;
  if (text == "cls") return SubsidyKind::kCls;
  if (text == "full") return SubsidyKind::kFull;
  if (text == "min_duration") return SubsidyKind::kMinDuration;
  throw ConfigError("subsidy.kind must be one of none, cls, full, min_duration (got '" +
                    std::string(text) + "')");
}

}  // namespace

std::string_view to_string(SubsidyKind kind) {
  switch (kind) {
    case SubsidyKind::kNone: return "none";
    case SubsidyKind::kCls: return "cls";
    case SubsidyKind::kFull: return "full";
    case SubsidyKind::kMinDuration: return "min_duration";
  }
  return "none";
}

double ScenarioConfig::end_time() const { return t_end ? *t_end : t0 + 20.0 / model.gamma; }

double ScenarioConfig::output_step() const {
  return sample_step ? *sample_step : (end_time() - t0) / 1000.0;
}

const std::vector<std::string_view>& known_keys() {
  static const std::vector<std::string_view> keys{
      "model.u_min",   "model.u_max", "model.cost",  "model.externality", "model.gamma",
      "initial.t0",    "initial.x0",  "subsidy.kind", "subsidy.s",        "subsidy.T",
      "run.t_end",     "run.dt",      "run.step",    "run.grid",          "run.s_min",
      "run.s_max",     "noext.target", "output"};
  return keys;
}

void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const auto number = [&] { return parse_number(value, key); };
  if (key == "model.u_min") c.model.u_min = number();
  else if (key == "model.u_max") c.model.u_max = number();
  else if (key == "model.cost") c.model.cost = number();
  else if (key == "model.externality") c.model.externality = number();
  else if (key == "model.gamma") c.model.gamma = number();
  else if (key == "initial.t0") c.t0 = number();
  else if (key == "initial.x0") c.x0 = number();
  else if (key == "subsidy.kind") c.kind = parse_kind(value);
  else if (key == "subsidy.s") c.level = number();
  else if (key == "subsidy.T") c.duration = number();
  else if (key == "run.t_end") c.t_end = number();
  else if (key == "run.dt") c.sample_step = number();
  else if (key == "run.step") c.oracle_step = number();
  else if (key == "run.grid") c.grid = parse_int(value, key);
  else if (key == "run.s_min") c.s_min = number();
  else if (key == "run.s_max") c.s_max = number();
  else if (key == "noext.target") c.target = number();
  else if (key == "output") c.output = std::string(value);
  else throw ConfigError("unknown key '" + std::string(key) + "'");
}

void apply_override(ScenarioConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like key=value (got '" + std::string(assignment) +
                      "')");
  }
  apply_setting(c, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ScenarioConfig parse_config(std::istream& in, std::string_view source) {
  ScenarioConfig c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(number) +
                        ": expected key = value");
    }
    try {
      apply_setting(c, text.substr(0, eq), text.substr(eq + 1));
    } catch (const ConfigError& err) {
      throw ConfigError(std::string(source) + ":" + std::to_string(number) + ": " + err.what());
    }
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

void validate(const ScenarioConfig& c) {
  c.model.validate();
  if (!std::isfinite(c.t0)) throw ConfigError("initial.t0 must be finite");
  if (!(c.x0 >= 0.0 && c.x0 <= 1.0)) throw ConfigError("initial.x0 must lie in [0, 1]");
  if (!(c.end_time() > c.t0) || !std::isfinite(c.end_time())) {
    throw ConfigError("run.t_end must be finite and greater than initial.t0");
  }
  if (!(c.output_step() > 0.0)) throw ConfigError("run.dt must be > 0");
  if (c.oracle_step && !(*c.oracle_step > 0.0)) throw ConfigError("run.step must be > 0");
  if (c.grid < 2) throw ConfigError("run.grid must be >= 2");
  switch (c.kind) {
    case SubsidyKind::kCls:
      if (!c.level || !c.duration) throw ConfigError("subsidy.kind = cls needs subsidy.s and subsidy.T");
      break;
    case SubsidyKind::kFull:
      if (!c.duration) throw ConfigError("subsidy.kind = full needs subsidy.T");
      break;
    default:
      break;
  }
  if (c.level && !(*c.level >= 0.0 && *c.level <= c.model.cost)) {
    throw ConfigError("subsidy.s must lie in [0, model.cost]");
  }
  if (c.duration && !(*c.duration >= 0.0)) throw ConfigError("subsidy.T must be >= 0");
}

}  // namespace adoptsub::scenario
