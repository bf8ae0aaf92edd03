#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adoptsub/adoption_model.hpp"
#include "adoptsub/closed_form.hpp"
#include "adoptsub/scenario/commands.hpp"
#include "adoptsub/scenario/config.hpp"
#include "adoptsub/scenario/csv.hpp"
#include "adoptsub/subsidy.hpp"

namespace fs = std::filesystem;
using namespace adoptsub;
using namespace adoptsub::scenario;

namespace {

const fs::path kConfigs = fs::path(ADOPTSUB_SOURCE_DIR) / "configs";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(int id) { return (kConfigs / ("example" + std::to_string(id) + ".cfg")).string(); }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("adoptsub_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ScenarioConfig example4() { return load_config(config(4)); }

}  // namespace

TEST(Config, ParsesKeysCommentsAndFractions) {
  std::istringstream in(
      "# comment\n"
      "model.u_min = 1\n"
      "model.u_max = 2   # trailing\n"
      "model.cost = 3\n"
      "model.externality = 3\n"
      "model.gamma = 1/3\n"
      "\n"
      "initial.x0 = 1/4\n"
      "subsidy.kind = full\n"
      "subsidy.T = 1.277\n");
  const auto c = parse_config(in);
  EXPECT_DOUBLE_EQ(c.model.gamma, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.x0, 0.25);
  EXPECT_EQ(c.kind, SubsidyKind::kFull);
  EXPECT_DOUBLE_EQ(*c.duration, 1.277);
  EXPECT_DOUBLE_EQ(c.end_time(), 60.0);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, RejectsUnknownKeysWithLineNumber) {
  std::istringstream in("model.u_min = 1\nmodel.colour = 2\n");
  try {
    parse_config(in, "x.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos) << e.what();
  }
  ScenarioConfig c;
  EXPECT_THROW(apply_override(c, "model.cost"), ConfigError);
  EXPECT_THROW(apply_override(c, "model.cost=abc"), ConfigError);
}

TEST(Config, OverridesReplaceFileValues) {
  auto c = example4();
  apply_override(c, "subsidy.s=1.25");
  apply_override(c, "initial.x0 = 0.125");
  EXPECT_DOUBLE_EQ(*c.level, 1.25);
  EXPECT_DOUBLE_EQ(c.x0, 0.125);
}

TEST(Config, ValidationRules) {
  auto base = example4();
  auto bad = base;
  bad.t_end = -1.0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = base;
  bad.x0 = 1.5;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = base;
  bad.kind = SubsidyKind::kCls;
  bad.duration.reset();
  EXPECT_THROW(validate(bad), ConfigError);
  bad = base;
  bad.grid = 1;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = base;
  bad.model.u_min = 3.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(Config, EveryKnownKeyIsAccepted) {
  ScenarioConfig c;
  for (auto key : known_keys()) {
    const std::string value = key == "subsidy.kind" ? "cls" : key == "output" ? "a.csv" : "1";
    EXPECT_NO_THROW(apply_setting(c, key, value)) << key;
  }
  // The reference file documents every key.
  const std::string ref = slurp(fs::path(ADOPTSUB_SOURCE_DIR) / "tools" / "scenario_reference.cfg");
  for (auto key : known_keys()) EXPECT_NE(ref.find(std::string(key) + " ="), std::string::npos) << key;
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(std::optional<double>{}), "inf");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, WriterChecksColumnCount) {
  std::ostringstream out;
  CsvWriter w(out, {"a", "b"});
  w.cell(1.5).cell("x");
  w.end_row();
  w.cell(true);
  EXPECT_THROW(w.end_row(), std::logic_error);
  EXPECT_THROW(w.cell(1).cell(2), std::logic_error);
  EXPECT_EQ(out.str().substr(0, 12), "a,b\n1.5,x\ntr");
}

TEST(Cli, EquilibriaOfBistableCase) {
  const auto r = cli({"equilibria", "-c", config(2)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "stable"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"0.5", "unstable"}));
  EXPECT_EQ(rows[3], (std::vector<std::string>{"1", "stable"}));
}

TEST(Cli, InvalidInputExitsTwo) {
  EXPECT_EQ(cli({"equilibria", "--set", "model.u_min=3", "--set", "model.u_max=2"}).code,
            kExitInvalidInput);
  const auto r = cli({"equilibria", "--set", "model.u_min=3", "--set", "model.u_max=2"});
  EXPECT_NE(r.err.find("u_min < u_max"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"simulate", "-c", config(2), "--set", "run.t_end=-1"}).code, kExitInvalidInput);
  EXPECT_EQ(cli({"simulate", "-c", "/nonexistent.cfg"}).code, kExitInvalidInput);
  EXPECT_EQ(cli({"reproduce", "7"}).code, kExitInvalidInput);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInvalidInput);
  EXPECT_EQ(cli({}).code, kExitInvalidInput);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, AssumptionViolationsExitThree) {
  // Full-subsidy analysis needs two stable corners.
  EXPECT_EQ(cli({"full-subsidy", "-c", config(3), "--set", "model.cost=1.5"}).code,
            kExitAssumptionViolated);
  // A level at or below the minimum subsidy never reaches the band top.
  EXPECT_EQ(cli({"simulate", "-c", config(4), "--set", "subsidy.s=0.5"}).code,
            kExitAssumptionViolated);
  // The no-externality analysis needs e = 0.
  EXPECT_EQ(cli({"noext", "-c", config(1), "--set", "model.externality=1"}).code,
            kExitAssumptionViolated);
}

TEST(Cli, SweepMatchesPlanner) {
  const auto r = cli({"sweep", "-c", config(4)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"s", "s_over_e", "feasible", "T_hat", "S", "regime",
                                                "method", "frontier"}));
  const auto p = example4().model;
  bool any_frontier = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = std::stod(rows[i][0]);
    if (s <= 0.5) EXPECT_EQ(rows[i][2], "false") << s;
    any_frontier = any_frontier || rows[i][7] == "true";
    // Thin adapter: every row agrees with a direct library call.
    const auto t_hat = min_duration(p, 0.0, s);
    EXPECT_EQ(rows[i][3], format_number(t_hat)) << s;
  }
  EXPECT_TRUE(any_frontier);
  EXPECT_NE(r.err.find("s_hat = 0.5"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"sweep", "-c", config(3)}).code, kExitInvalidInput);
}

TEST(Cli, MinDurationAtLevelTwo) {
  const auto p = example4().model;
  const auto t_hat = min_duration(p, 0.0, 2.0);
  ASSERT_TRUE(t_hat);
  EXPECT_NEAR(*t_hat, 0.2877, 1e-4);
  EXPECT_NEAR(*min_duration_cost(p, 0.0, 2.0).value, 0.0754, 1e-4);

  const auto r = cli({"simulate", "-c", config(4), "--set", "run.t_end=2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  bool saw_release = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][0]) == *t_hat) {
      saw_release = true;
      EXPECT_EQ(rows[i][2], "unsubsidized");
      EXPECT_NEAR(std::stod(rows[i][1]), *classify_equilibria(p).interior, 1e-12);
    }
  }
  EXPECT_TRUE(saw_release);
}

TEST(Cli, SimulateIsThinAdapter) {
  const auto c = load_config(config(2));
  const auto path = unsubsidized_trajectory(c.model, c.t0, c.x0);
  std::ostringstream csv, summary;
  cmd_simulate(c, csv, summary);
  const auto rows = parse_csv(csv.str());
  // 1001 uniform samples plus the band-entry breakpoint.
  EXPECT_EQ(rows.size(), 1u + 1001u + path.breakpoints().size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], format_number(eval(path, std::stod(rows[i][0]))));
  }
}

TEST(Cli, FullSubsidyQuantities) {
  const auto r = cli({"full-subsidy", "-c", config(3)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[1][0], "threshold_low");
  EXPECT_NEAR(std::stod(rows[1][1]), 3.0 * std::log(9.0 / 8.0), 1e-15);
  EXPECT_NEAR(std::stod(rows[2][1]), 3.0 * std::log(1.5), 1e-15);
  EXPECT_NEAR(std::stod(rows[3][1]), 6.0 * std::log(1.5), 1e-15);
  EXPECT_EQ(rows[5], (std::vector<std::string>{"post_subsidy_interval", "3"}));
  EXPECT_EQ(rows[6], (std::vector<std::string>{"final_level", "1"}));
}

TEST(Cli, NoextDurationsAndCosts) {
  const auto r = cli({"noext", "-c", config(1)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 102u);
  const UniformAffinity dist(1.0, 6.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = std::stod(rows[i][0]);
    if (s <= -0.5) EXPECT_EQ(rows[i][1], "inf") << s;
    EXPECT_EQ(rows[i][1], format_number(noext_required_duration(dist, 3.0, 1.0, s, 0.0, 0.5)));
  }
}

TEST(Cli, ValidateExitCodes) {
  for (int id : {1, 2, 3, 4}) {
    const auto r = cli({"validate", "-c", config(id)});
    EXPECT_EQ(r.code, kExitOk) << id << "\n" << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  }
  const auto r = cli({"validate", "-c", config(3), "--set", "run.step=50"});
  EXPECT_EQ(r.code, kExitValidationFailed);
  EXPECT_NE(r.out.find("FAIL rk4 step"), std::string::npos) << r.out;
}

TEST(Cli, OutputFileAndDeterminism) {
  const fs::path dir = scratch("output");
  const auto a = cli({"sweep", "-c", config(4), "--set", "output=sweep.csv", "--out-dir",
                      dir.string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const std::string first = slurp(dir / "sweep.csv");
  const auto b = cli({"sweep", "-c", config(4), "--set", "output=sweep.csv", "--out-dir",
                      dir.string()});
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(dir / "sweep.csv"));
  EXPECT_EQ(first, cli({"sweep", "-c", config(4)}).out);
  fs::remove_all(dir);
}

TEST(Reproduce, ExampleTwoTable) {
  const fs::path dir = scratch("ex2");
  ASSERT_EQ(cli({"reproduce", "2", "--out-dir", dir.string()}).code, kExitOk);
  const auto rows = parse_csv(slurp(dir / "example2_table.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1][5], "3");
  EXPECT_EQ(rows[1][8], "0:stable");
  EXPECT_EQ(rows[2][8], "0.5:stable");
  EXPECT_EQ(rows[3][8], "0:stable;0.5:unstable;1:stable");
  EXPECT_EQ(rows[4][5], "2");
  EXPECT_EQ(rows[4][8], "1:stable");
  EXPECT_TRUE(fs::exists(dir / "example2_trajectories.csv"));
  fs::remove_all(dir);
}

TEST(Reproduce, ExampleThreeDurations) {
  const fs::path dir = scratch("ex3");
  ASSERT_EQ(cli({"reproduce", "3", "--out-dir", dir.string()}).code, kExitOk);
  const auto rows = parse_csv(slurp(dir / "example3_durations.csv"));
  ASSERT_EQ(rows.size(), 8u);
  const char* intervals[] = {"1", "1", "2", "2", "3", "3", "4"};
  const char* finals[] = {"0", "0", "0", "0", "1", "1", "1"};
  for (int k = 0; k < 7; ++k) {
    EXPECT_EQ(rows[k + 1][2], intervals[k]) << k;
    EXPECT_EQ(rows[k + 1][3], finals[k]) << k;
  }
  EXPECT_NEAR(std::stod(rows[4][1]), 1.156, 5e-4);
  EXPECT_NEAR(std::stod(rows[5][1]), 1.277, 5e-4);
  fs::remove_all(dir);
}

TEST(Reproduce, ExampleFourBoundsAndSweeps) {
  const fs::path dir = scratch("ex4");
  std::ostringstream summary;
  const auto files = cmd_reproduce(4, dir, summary);
  EXPECT_EQ(files.size(), 3u);
  const auto bounds = parse_csv(slurp(dir / "example4_bounds.csv"));
  EXPECT_EQ(bounds[1][1], "0.5");
  EXPECT_NEAR(std::stod(bounds[2][1]), 0.25, 1e-15);
  for (const char* name : {"example4_sweep_y0_0.csv", "example4_sweep_y0_0.125.csv"}) {
    EXPECT_GT(parse_csv(slurp(dir / name)).size(), 512u) << name;
  }
  EXPECT_EQ(summary.str().find("MISMATCH"), std::string::npos) << summary.str();
  fs::remove_all(dir);
}

TEST(Reproduce, ExampleOneFiles) {
  const fs::path dir = scratch("ex1");
  ASSERT_EQ(cli({"reproduce", "1", "--out-dir", dir.string()}).code, kExitOk);
  const auto traj = parse_csv(slurp(dir / "example1_trajectories.csv"));
  // T = inf: x(t) = (1 - e^{-t}) with c = s = 1/2 on Uni[0, 1].
  for (const auto& row : traj) {
    if (row[0] != "inf") continue;
    const double t = std::stod(row[1]);
    EXPECT_NEAR(std::stod(row[2]), 1.0 - std::exp(-t), 1e-14);
  }
  EXPECT_TRUE(fs::exists(dir / "example1_duration_cost.csv"));
  fs::remove_all(dir);
}
