#include "adoptsub/numeric_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "adoptsub/errors.hpp"

namespace adoptsub {
namespace {

// Evaluation time kept strictly inside [ta, tb) so the schedule is read as
// its limit from within the piece.
double inside(double t, double ta, double tb) {
  return std::clamp(t, ta, std::nextafter(tb, ta));
}

std::vector<double> interior_breakpoints(const SubsidySchedule& schedule, double t0,
                                         double t_end) {
  std::vector<double> out;
  for (double b : schedule.breakpoints) {
    if (b > t0 && b < t_end && std::isfinite(b)) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double simpson_uniform(std::span<const double> f, double h) {
  const std::size_t n = f.size() - 1;  // intervals
  if (n == 0) return 0.0;
  if (n == 1) return 0.5 * h * (f[0] + f[1]);
  if (n == 2) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  double total = 0.0;
  std::size_t even_end = n;
  if (n % 2 == 1) {
    // Simpson 3/8 on the last three intervals.
    even_end = n - 3;
    total += 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
  }
  if (even_end >= 2) {
    double sum = f[0] + f[even_end];
    for (std::size_t i = 1; i < even_end; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    total += h / 3.0 * sum;
  }
  return total;
}

}  // namespace

SubsidySchedule SubsidySchedule::none() {
  return {[](double, double) { return 0.0; }, {}};
}

SubsidySchedule SubsidySchedule::constant_level(double s, double start, double duration) {
  const double end = start + duration;
  SubsidySchedule out{[s, start, end](double t, double) {
                        return (t >= start && t < end) ? s : 0.0;
                      },
                      {start}};
  if (std::isfinite(end)) out.breakpoints.push_back(end);
  return out;
}

double SampledTrajectory::level_at(double t) const {
  if (t <= times.front()) return levels.front();
  if (t >= times.back()) return levels.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double w = (t - times[i]) / (times[i + 1] - times[i]);
  return levels[i] + w * (levels[i + 1] - levels[i]);
}

double default_oracle_step(const ModelParams& params) { return 1e-3 / params.gamma; }

SampledTrajectory integrate_ode(const ModelParams& p, const AffinityDistribution& dist,
                                const SubsidySchedule& schedule, double t0, double x0,
                                double t_end, double dt) {
  p.validate();
  if (!(dt > 0.0) || p.gamma * dt > kMaxOracleStep * (1.0 + 1e-12)) {
    throw InvalidStep("oracle step must satisfy 0 < gamma*dt <= 1e-2 (got gamma*dt=" +
                      std::to_string(p.gamma * dt) + ")");
  }
  if (!(t_end > t0)) throw InvalidStep("oracle span must satisfy t_end > t0");

  const auto rhs = [&](double t, double x, double ta, double tb) {
    const double s = schedule.level ? schedule.level(inside(t, ta, tb), x) : 0.0;
    return p.gamma * (dist.ccdf(p.cost - s - p.externality * x) - x);
  };

  std::vector<double> edges{t0};
  for (double b : interior_breakpoints(schedule, t0, t_end)) edges.push_back(b);
  edges.push_back(t_end);

  SampledTrajectory out;
  out.start_time = t0;
  out.step = dt;
  out.times.push_back(t0);
  out.levels.push_back(x0);
  double x = x0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double ta = edges[k];
    const double tb = edges[k + 1];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((tb - ta) / dt - 1e-9)));
    const double h = (tb - ta) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = ta + static_cast<double>(i) * h;
      const double k1 = rhs(t, x, ta, tb);
      const double k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1, ta, tb);
      const double k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2, ta, tb);
      const double k4 = rhs(t + h, x + h * k3, ta, tb);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      out.times.push_back(i + 1 == n ? tb : ta + static_cast<double>(i + 1) * h);
      out.levels.push_back(x);
    }
  }
  return out;
}

SampledTrajectory integrate_ode(const ModelParams& p, const SubsidySchedule& schedule,
                                double t0, double x0, double t_end, double dt) {
  return integrate_ode(p, UniformAffinity(p.u_min, p.u_max), schedule, t0, x0, t_end, dt);
}

double integrate_cost(const SampledTrajectory& sampled, const SubsidySchedule& schedule) {
  if (!schedule.level || sampled.times.size() < 2) return 0.0;
  const double t0 = sampled.times.front();
  const double t_end = sampled.times.back();

  // Piece boundaries: schedule breakpoints that coincide with sample times.
  std::vector<std::size_t> cuts{0};
  for (double b : interior_breakpoints(schedule, t0, t_end)) {
    const auto it = std::lower_bound(sampled.times.begin(), sampled.times.end(), b);
    if (it == sampled.times.end()) continue;
    auto idx = static_cast<std::size_t>(it - sampled.times.begin());
    if (idx > 0 && std::abs(sampled.times[idx - 1] - b) < std::abs(*it - b)) --idx;
    if (idx > cuts.back() && idx + 1 < sampled.times.size()) cuts.push_back(idx);
  }
  cuts.push_back(sampled.times.size() - 1);

  double total = 0.0;
  std::vector<double> f;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const std::size_t i0 = cuts[k];
    const std::size_t i1 = cuts[k + 1];
    const double ta = sampled.times[i0];
    const double tb = sampled.times[i1];
    f.clear();
    for (std::size_t i = i0; i <= i1; ++i) {
      const double x = sampled.levels[i];
      f.push_back(schedule.level(inside(sampled.times[i], ta, tb), x) * x);
    }
    total += simpson_uniform(f, (tb - ta) / static_cast<double>(i1 - i0));
  }
  return total;
}

std::vector<Equilibrium> brute_force_equilibria(const ModelParams& p, int grid_n) {
  p.validate();
  if (grid_n < 1000) throw std::invalid_argument("brute_force_equilibria needs grid_n >= 1000");
  const auto g = [&p](double x) { return would_adopt(x, p) - x; };
  const auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  constexpr double kNudge = 1e-11;

  std::vector<double> roots;
  const auto node = [grid_n](int i) { return static_cast<double>(i) / grid_n; };
  for (int i = 0; i <= grid_n; ++i) {
    if (g(node(i)) == 0.0) roots.push_back(node(i));
  }
  for (int i = 0; i < grid_n; ++i) {
    double a = node(i);
    double b = node(i + 1);
    if (g(a) == 0.0) a += kNudge;
    if (g(b) == 0.0) b -= kNudge;
    int sa = sign(g(a));
    const int sb = sign(g(b));
    if (sa == 0 || sb == 0 || sa == sb) continue;
    while (b - a > 1e-13) {
      const double m = 0.5 * (a + b);
      const int sm = sign(g(m));
      if (sm == 0) {
        a = b = m;
        break;
      }
      if (sm == sa) {
        a = m;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-10; }),
              roots.end());

  constexpr double kProbe = 1e-7;
  std::vector<Equilibrium> out;
  for (double x : roots) {
    bool stable = true;
    if (x - kProbe >= 0.0) stable = stable && g(x - kProbe) > 0.0;
    if (x + kProbe <= 1.0) stable = stable && g(x + kProbe) < 0.0;
    out.push_back({x, stable ? Stability::kStable : Stability::kUnstable});
  }
  return out;
}

double max_deviation(const PiecewiseTrajectory& traj, const SampledTrajectory& sampled) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sampled.times.size(); ++i) {
    worst = std::max(worst, std::abs(eval(traj, sampled.times[i]) - sampled.levels[i]));
  }
  return worst;
}

std::optional<double> first_passage(const SampledTrajectory& sampled, double target) {
  const auto& x = sampled.levels;
  const auto& t = sampled.times;
  if (x.empty()) return std::nullopt;
  if (x.front() == target) return t.front();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double d0 = x[i] - target;
    const double d1 = x[i + 1] - target;
    if (d1 == 0.0) return t[i + 1];
    if ((d0 < 0.0) != (d1 < 0.0)) return t[i] + (t[i + 1] - t[i]) * d0 / (d0 - d1);
  }
  return std::nullopt;
}

}  // namespace adoptsub
