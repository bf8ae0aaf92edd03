#include "adoptsub/scenario/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adoptsub/adoption_model.hpp"
#include "adoptsub/closed_form.hpp"
#include "adoptsub/errors.hpp"
#include "adoptsub/numeric_oracle.hpp"
#include "adoptsub/scenario/csv.hpp"

namespace adoptsub::scenario {
namespace {

constexpr double kPathTol = 1e-6;
constexpr double kCostTol = 1e-5;
constexpr double kMonotoneTol = 1e-9;

std::string num(double v) { return format_number(v); }

std::string num(const std::optional<double>& v) { return format_number(v); }

// The closed-form path a config describes, with its subsidy window.
struct Scenario {
  PiecewiseTrajectory path;
  double level = 0.0;
  double subsidy_end;  // == t0 when unsubsidised
  std::optional<FullSubsidyReport> full;
};

Scenario build_scenario(const ScenarioConfig& c) {
  const ModelParams& p = c.model;
  switch (c.kind) {
    case SubsidyKind::kNone:
      return {unsubsidized_trajectory(p, c.t0, c.x0), 0.0, c.t0, std::nullopt};
    case SubsidyKind::kCls: {
      const ConstantLevelSubsidy cls{*c.level, *c.duration, c.t0};
      return {subsidized_trajectory(p, cls, c.x0), cls.level, c.t0 + cls.duration, std::nullopt};
    }
    case SubsidyKind::kFull: {
      auto rep = full_subsidy_analysis(p, c.t0, c.x0, *c.duration);
      auto path = rep.trajectory;
      return {std::move(path), p.cost, c.t0 + *c.duration, std::move(rep)};
    }
    case SubsidyKind::kMinDuration: {
      if (!c.level) throw ConfigError("subsidy.kind = min_duration needs subsidy.s here");
      const auto t_hat = min_duration(p, c.x0, *c.level);
      if (!t_hat) {
        throw InfeasibleSubsidy("subsidy.s = " + num(*c.level) +
                                " does not exceed the minimum subsidy " +
                                num(min_subsidy(p, c.x0)));
      }
      const ConstantLevelSubsidy cls{*c.level, *t_hat, c.t0};
      return {subsidized_trajectory(p, cls, c.x0), cls.level, c.t0 + *t_hat, std::nullopt};
    }
  }
  throw ConfigError("unknown subsidy kind");
}

SubsidySchedule schedule_of(const Scenario& s, double t0) {
  if (s.level == 0.0 || s.subsidy_end <= t0) return SubsidySchedule::none();
  return SubsidySchedule::constant_level(s.level, t0, s.subsidy_end - t0);
}

// Uniform output grid plus every breakpoint inside [t0, t_end].
std::vector<double> sample_times(double t0, double t_end, double step,
                                 const std::vector<double>& extra) {
  std::vector<double> times;
  for (long i = 0;; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    if (t >= t_end) break;
    times.push_back(t);
  }
  times.push_back(t_end);
  for (double b : extra) {
    if (b > t0 && b < t_end) times.push_back(b);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

void write_path_rows(CsvWriter& csv, const PiecewiseTrajectory& path, double t0, double t_end,
                     double step, double subsidy_end) {
  std::vector<double> extra = path.breakpoints();
  if (subsidy_end > t0) extra.push_back(subsidy_end);
  for (double t : sample_times(t0, t_end, step, extra)) {
    csv.cell(t).cell(eval(path, t)).cell(t < subsidy_end ? "subsidized" : "unsubsidized");
    csv.end_row();
  }
}

std::string equilibria_list(const EquilibriumReport& rep) {
  std::string out;
  for (const auto& eq : rep.equilibria) {
    if (!out.empty()) out += ';';
    out += num(eq.level) + ":" + to_string(eq.stability);
  }
  return out;
}

void write_sign_summary(const SweepResult& res, std::ostream& summary) {
  for (const auto& rep : res.sign_pattern) {
    summary << fmt::format("  interval {} s/e in [{}, {}]: +{} -{} 0:{} changes {} -> {}\n",
                           rep.interval, num(rep.lower), num(rep.upper), rep.positive,
                           rep.negative, rep.zero, rep.sign_changes,
                           rep.matches ? "matches" : "MISMATCH");
  }
}

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ADOPTSUB_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

// --- verbs -------------------------------------------------------------------

void cmd_equilibria(const ScenarioConfig& c, std::ostream& csv_out, std::ostream& summary) {
  validate(c);
  const auto rep = classify_equilibria(c.model);
  summary << "case " << rep.case_id << "\n";
  summary << "interior x°(c) = " << (rep.interior ? num(*rep.interior) : "undefined") << "\n";
  if (rep.band_low) {
    summary << "band [(c - u_max)/e, (c - u_min)/e] = [" << num(*rep.band_low) << ", "
            << num(*rep.band_high) << "]\n";
  }
  summary << "equilibria " << equilibria_list(rep) << "\n";
  CsvWriter csv(csv_out, {"level", "stability"});
  for (const auto& eq : rep.equilibria) {
    csv.cell(eq.level).cell(to_string(eq.stability));
    csv.end_row();
  }
}

void cmd_simulate(const ScenarioConfig& c, std::ostream& csv_out, std::ostream& summary) {
  validate(c);
  const Scenario s = build_scenario(c);
  summary << "kind " << to_string(c.kind) << ", subsidy until t = " << num(s.subsidy_end)
          << ", long-run level " << num(s.path.limit()) << "\n";
  CsvWriter csv(csv_out, {"t", "x", "phase"});
  write_path_rows(csv, s.path, c.t0, c.end_time(), c.output_step(), s.subsidy_end);
}

void write_sweep_csv(const SweepResult& res, std::ostream& csv_out) {
  CsvWriter csv(csv_out,
                {"s", "s_over_e", "feasible", "T_hat", "S", "regime", "method", "frontier"});
  for (const auto& row : res.rows) {
    csv.cell(row.level)
        .cell(row.normalized)
        .cell(row.feasible)
        .cell(row.duration)
        .cell(row.cost.value)
        .cell(to_string(row.regime))
        .cell(to_string(row.cost.method))
        .cell(row.on_frontier);
    csv.end_row();
  }
}

void cmd_sweep(const ScenarioConfig& c, std::ostream& csv_out, std::ostream& summary) {
  validate(c);
  if (c.kind != SubsidyKind::kMinDuration) {
    throw ConfigError("sweep needs subsidy.kind = min_duration");
  }
  const auto grid = default_sweep_grid(c.model, c.x0, c.grid);
  const auto res = sweep(c.model, c.x0, grid);
  const auto b = subsidy_bounds(c.model, c.x0);
  summary << "minimum subsidy s_hat = " << num(min_subsidy(c.model, c.x0))
          << " (s_hat/e = " << num(b.minimum) << ")\n";
  summary << "bounds s/e: " << num(b.below_band) << ", " << num(b.minimum) << ", "
          << num(b.knee_at_top) << ", " << num(b.start_at_top) << ", " << num(b.full) << "\n";
  summary << res.rows.size() << " rows, " << res.frontier.frontier.size() << " on the frontier";
  if (res.cost_turning_point) summary << ", cost turning point s = " << num(*res.cost_turning_point);
  summary << "\n";
  write_sign_summary(res, summary);
  write_sweep_csv(res, csv_out);
}

void cmd_full_subsidy(const ScenarioConfig& c, std::ostream& csv_out, std::ostream& summary) {
  validate(c);
  if (!c.duration) throw ConfigError("full-subsidy needs subsidy.T");
  const auto rep = full_subsidy_analysis(c.model, c.t0, c.x0, *c.duration);
  summary << "thresholds T_low = " << num(rep.threshold_low) << ", T_knee = "
          << num(rep.threshold_knee) << ", T_high = " << num(rep.threshold_high) << "\n";
  summary << "T = " << num(rep.duration) << " (interval " << rep.post_subsidy_row
          << "), final level " << num(rep.final_level) << ", cost " << num(rep.cost) << "\n";
  CsvWriter csv(csv_out, {"quantity", "value"});
  const std::pair<const char*, double> rows[] = {
      {"threshold_low", rep.threshold_low},   {"threshold_knee", rep.threshold_knee},
      {"threshold_high", rep.threshold_high}, {"duration", rep.duration},
      {"post_subsidy_interval", static_cast<double>(rep.post_subsidy_row)},
      {"final_level", rep.final_level},       {"cost", rep.cost}};
  for (const auto& [name, value] : rows) {
    csv.cell(name).cell(value);
    csv.end_row();
  }
}

void cmd_noext(const ScenarioConfig& c, std::ostream& csv_out, std::ostream& summary) {
  validate(c);
  if (c.model.externality != 0.0) {
    throw AssumptionViolation("noext needs model.externality = 0 (got " +
                              num(c.model.externality) + ")");
  }
  if (!c.target) throw ConfigError("noext needs noext.target");
  const UniformAffinity dist(c.model.u_min, c.model.u_max);
  const double lo = c.s_min.value_or(0.0);
  const double hi = c.s_max.value_or(c.model.cost);
  if (!(hi > lo)) throw ConfigError("run.s_max must exceed run.s_min");
  CsvWriter csv(csv_out, {"s", "T", "S", "decreasing_condition"});
  int finite = 0;
  for (int i = 0; i < c.grid; ++i) {
    const double s = lo + (hi - lo) * i / (c.grid - 1);
    const double cost = c.model.cost;
    const auto t = noext_required_duration(dist, cost, c.model.gamma, s, c.x0, *c.target);
    const auto total = noext_cost_at_target(dist, cost, c.model.gamma, s, c.x0, *c.target);
    finite += t ? 1 : 0;
    csv.cell(s).cell(t).cell(total).cell(noext_cost_decreasing_condition(dist, cost, s));
    csv.end_row();
  }
  summary << finite << " of " << c.grid << " levels reach the target " << num(*c.target) << "\n";
}

bool cmd_validate(const ScenarioConfig& c, std::ostream& report) {
  validate(c);
  bool all = true;
  const auto verdict = [&](bool ok, std::string_view name, const std::string& detail) {
    all = all && ok;
    report << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };

  const Scenario s = build_scenario(c);
  const SubsidySchedule schedule = schedule_of(s, c.t0);
  const double step = c.oracle_step.value_or(default_oracle_step(c.model));
  // Released exactly at the unstable knee, the two solutions part ways for
  // reasons of rounding only; compare the subsidised window there.
  const double span_end =
      c.kind == SubsidyKind::kMinDuration ? std::min(c.end_time(), s.subsidy_end) : c.end_time();

  std::optional<SampledTrajectory> rk4;
  try {
    rk4 = integrate_ode(c.model, schedule, c.t0, c.x0, span_end, step);
  } catch (const InvalidStep& err) {
    verdict(false, "rk4 step", err.what());
  }
  if (rk4) {
    const double dev = max_deviation(s.path, *rk4);
    verdict(dev <= kPathTol, "trajectory vs rk4",
            fmt::format("max |closed form - rk4| = {} (tol {})", num(dev), num(kPathTol)));

    std::optional<double> analytic;
    if (c.kind == SubsidyKind::kFull) analytic = s.full->cost;
    if (c.kind == SubsidyKind::kMinDuration) analytic = min_duration_cost(c.model, c.x0, s.level).value;
    if (c.kind == SubsidyKind::kCls && c.model.externality == 0.0) {
      analytic = noext_subsidy_cost(UniformAffinity(c.model.u_min, c.model.u_max), c.model.cost,
                                    c.model.gamma, {s.level, s.subsidy_end - c.t0, c.t0}, c.x0);
    }
    if (analytic && s.subsidy_end <= span_end) {
      const double dev = std::abs(*analytic - integrate_cost(*rk4, schedule));
      verdict(dev <= kCostTol, "cost vs quadrature",
              fmt::format("|S - integral| = {} (tol {})", num(dev), num(kCostTol)));
    }

    // Fourth-order convergence on the first smooth piece of the path.
    const auto bps = s.path.breakpoints();
    double smooth_end = span_end;
    for (double b : bps) {
      if (b > c.t0) smooth_end = std::min(smooth_end, b);
    }
    if (s.subsidy_end > c.t0) smooth_end = std::min(smooth_end, s.subsidy_end);
    if (smooth_end - c.t0 >= 8.0 * step) {
      const auto final_at = [&](double h) {
        return integrate_ode(c.model, schedule, c.t0, c.x0, smooth_end, h).levels.back();
      };
      const double fine = final_at(step / 4.0);
      const double e1 = std::abs(final_at(step) - fine);
      const double e2 = std::abs(final_at(step / 2.0) - fine);
      const bool ok = e1 <= 1e-13 || (e2 > 0.0 && e1 / e2 >= 8.0);
      verdict(ok, "rk4 self-convergence",
              fmt::format("final-time error {} at dt, ratio dt vs dt/2 = {} on [{}, {}]", num(e1),
                          e2 > 0.0 ? num(e1 / e2) : std::string("inf"), num(c.t0),
                          num(smooth_end)));
    }
  }

  const auto rep = classify_equilibria(c.model);
  if (rep.case_id == 3 && rep.interior && c.x0 < *rep.interior &&
      c.model.affinity_width() != c.model.externality) {
    const auto res = sweep(c.model, c.x0, default_sweep_grid(c.model, c.x0, c.grid));
    double prev = INFINITY;
    bool monotone = true;
    for (const auto& row : res.rows) {
      if (!row.duration) continue;
      monotone = monotone && *row.duration <= prev + kMonotoneTol;
      prev = *row.duration;
    }
    verdict(monotone, "T_hat nonincreasing", fmt::format("{} grid levels", res.rows.size()));
    bool signs = true;
    for (const auto& r : res.sign_pattern) signs = signs && r.matches;
    verdict(signs, "cost sign pattern", "five intervals");
  }
  return all;
}

// --- reproduction -------------------------------------------------------------

std::vector<std::filesystem::path> cmd_reproduce(int id, const std::filesystem::path& dir,
                                                 std::ostream& summary) {
  if (id < 1 || id > 4) throw ConfigError("unknown example id " + std::to_string(id) + " (1-4)");
  std::vector<std::filesystem::path> files;
  const auto open = [&](const std::string& name) {
    files.push_back(dir / name);
    return open_output(files.back());
  };

  if (id == 1) {
    const UniformAffinity unit(0.0, 1.0);
    auto traj_out = open("example1_trajectories.csv");
    CsvWriter traj(traj_out, {"T", "t", "x"});
    for (double duration : {0.0, 1.0, 2.0, static_cast<double>(INFINITY)}) {
      const auto path = noext_cls_trajectory(unit, 0.5, 1.0, {0.5, duration, 0.0}, 0.0);
      for (int i = 0; i <= 500; ++i) {
        const double t = i * 0.01;
        traj.cell(duration).cell(t).cell(eval(path, t));
        traj.end_row();
      }
    }
    const UniformAffinity wide(1.0, 6.0);
    auto cost_out = open("example1_duration_cost.csv");
    CsvWriter cost(cost_out, {"s", "T", "S", "decreasing_condition"});
    for (int i = 0; i <= 500; ++i) {
      const double s = -3.0 + 5.0 * i / 500;
      cost.cell(s)
          .cell(noext_required_duration(wide, 3.0, 1.0, s, 0.0, 0.5))
          .cell(noext_cost_at_target(wide, 3.0, 1.0, s, 0.0, 0.5))
          .cell(noext_cost_decreasing_condition(wide, 3.0, s));
      cost.end_row();
    }
    summary << "T(s, 1/2) finite for s > -1/2; S(s, T(s, 1/2)) over s in [-3, 2]\n";
  }

  if (id == 2) {
    const double costs[] = {5.0, 1.75, 2.5, 1.0};
    const double externalities[] = {2.0, 0.5, 2.0, 0.5};
    auto table_out = open("example2_table.csv");
    CsvWriter table(table_out, {"case", "u_min", "u_max", "cost", "externality", "x_interior",
                                "band_high", "band_low", "equilibria"});
    auto traj_out = open("example2_trajectories.csv");
    CsvWriter traj(traj_out, {"case", "x0", "t", "x"});
    for (int k = 0; k < 4; ++k) {
      const ModelParams p{1.0, 2.0, costs[k], externalities[k], 1.0};
      const auto rep = classify_equilibria(p);
      table.cell(rep.case_id).cell(p.u_min).cell(p.u_max).cell(p.cost).cell(p.externality);
      table.cell(rep.interior).cell(rep.band_high).cell(rep.band_low).cell(equilibria_list(rep));
      table.end_row();
      summary << "case " << rep.case_id << ": x° = " << num(rep.interior) << ", equilibria "
              << equilibria_list(rep) << "\n";
      for (double x0 : {0.1, 1.0 / 3.0, 2.0 / 3.0, 0.9}) {
        const auto path = unsubsidized_trajectory(p, 0.0, x0);
        for (int i = 0; i <= 200; ++i) {
          const double t = i * 0.05;
          traj.cell(rep.case_id).cell(x0).cell(t).cell(eval(path, t));
          traj.end_row();
        }
      }
    }
  }

  if (id == 3) {
    const ModelParams p{1.0, 2.0, 3.0, 3.0, 1.0 / 3.0};
    const double y0 = 0.25;
    const auto base = full_subsidy_analysis(p, 0.0, y0, 0.0);
    auto th_out = open("example3_thresholds.csv");
    CsvWriter th(th_out, {"quantity", "value"});
    th.cell("threshold_low").cell(base.threshold_low);
    th.end_row();
    th.cell("threshold_knee").cell(base.threshold_knee);
    th.end_row();
    th.cell("threshold_high").cell(base.threshold_high);
    th.end_row();
    const double lo = base.threshold_low;
    const double kn = base.threshold_knee;
    const double hi = base.threshold_high;
    const double durations[] = {0.0,       lo / 2,         (lo + kn) / 2,     0.95 * kn,
                                1.05 * kn, (kn + hi) / 2, (3 * hi - kn) / 2};
    auto dur_out = open("example3_durations.csv");
    CsvWriter dur(dur_out, {"index", "T", "post_subsidy_interval", "final_level", "cost"});
    auto traj_out = open("example3_trajectories.csv");
    CsvWriter traj(traj_out, {"index", "t", "x", "phase"});
    for (int k = 0; k < 7; ++k) {
      const auto rep = full_subsidy_analysis(p, 0.0, y0, durations[k]);
      dur.cell(k + 1).cell(durations[k]).cell(rep.post_subsidy_row).cell(rep.final_level);
      dur.cell(rep.cost);
      dur.end_row();
      std::vector<double> extra = rep.trajectory.breakpoints();
      for (double t : sample_times(0.0, 15.0, 0.025, extra)) {
        traj.cell(k + 1).cell(t).cell(eval(rep.trajectory, t));
        traj.cell(t < durations[k] ? "subsidized" : "unsubsidized");
        traj.end_row();
      }
    }
    summary << "thresholds " << fmt::format("{:.3f} {:.3f} {:.3f}", lo, kn, hi) << "\n";
  }

  if (id == 4) {
    const ModelParams p{1.0, 2.0, 2.5, 3.0, 1.0};
    auto bounds_out = open("example4_bounds.csv");
    CsvWriter bounds(bounds_out, {"y0", "s_hat", "s_hat_over_e", "below_band", "knee_at_top",
                                  "start_at_top", "full"});
    for (double y0 : {0.0, 0.125}) {
      const auto b = subsidy_bounds(p, y0);
      bounds.cell(y0).cell(min_subsidy(p, y0)).cell(b.minimum).cell(b.below_band);
      bounds.cell(b.knee_at_top).cell(b.start_at_top).cell(b.full);
      bounds.end_row();
      const auto res = sweep(p, y0, default_sweep_grid(p, y0, 512));
      auto sweep_out = open(y0 == 0.0 ? "example4_sweep_y0_0.csv" : "example4_sweep_y0_0.125.csv");
      write_sweep_csv(res, sweep_out);
      summary << "y0 = " << num(y0) << ": s_hat = " << num(min_subsidy(p, y0)) << "\n";
      write_sign_summary(res, summary);
    }
  }

  for (const auto& f : files) summary << "wrote " << f.string() << "\n";
  return files;
}

// --- command line -------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adoption dynamics with network externalities under constant-level subsidies"};
  app.name("adoptsub");
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int example_id = 0;

  const auto scenario_verb = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "scenario file (key = value)");
    sub->add_option("--set", overrides, "override a config key, key=value")->allow_extra_args(false);
    sub->add_option("--out-dir", out_dir, "directory for the CSV named by `output`");
    return sub;
  };
  scenario_verb("equilibria", "equilibrium set, stability and band edges");
  scenario_verb("simulate", "closed-form trajectory samples");
  scenario_verb("sweep", "minimum-duration planner over a grid of subsidy levels");
  scenario_verb("full-subsidy", "full-cost subsidy thresholds, outcome and cost");
  scenario_verb("noext", "no-externality duration and cost over a range of subsidy levels");
  scenario_verb("validate", "closed forms against the numerical oracle");
  CLI::App* reproduce = app.add_subcommand("reproduce", "data files for examples 1-4");
  reproduce->add_option("example", example_id, "example id 1-4")->required();
  reproduce->add_option("--out-dir", out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    if (verb == "reproduce") {
      cmd_reproduce(example_id, output_dir(out_dir), out);
      return kExitOk;
    }

    ScenarioConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);

    if (verb == "validate") return cmd_validate(config, out) ? kExitOk : kExitValidationFailed;

    using Verb = void (*)(const ScenarioConfig&, std::ostream&, std::ostream&);
    Verb run = nullptr;
    if (verb == "equilibria") run = cmd_equilibria;
    if (verb == "simulate") run = cmd_simulate;
    if (verb == "sweep") run = cmd_sweep;
    if (verb == "full-subsidy") run = cmd_full_subsidy;
    if (verb == "noext") run = cmd_noext;

    if (config.output.empty()) {
      run(config, out, err);
    } else {
      const auto path = output_dir(out_dir) / config.output;
      // Build in memory so a failing command leaves no partial file behind.
      std::ostringstream csv;
      run(config, csv, out);
      open_output(path) << csv.str();
      out << "wrote " << path.string() << "\n";
    }
    return kExitOk;
  } catch (const AssumptionViolation& e) {
    err << "assumption violated: " << e.what() << "\n";
    return kExitAssumptionViolated;
  } catch (const InfeasibleSubsidy& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitAssumptionViolated;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace adoptsub::scenario
