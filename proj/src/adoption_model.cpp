#include "adoptsub/adoption_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adoptsub/errors.hpp"

namespace adoptsub {
namespace {

constexpr double kConstructedTol = 1e-12;
constexpr double kUserTol = 1e-9;

// Left and right derivatives of h at x.
struct Slopes {
  double left;
  double right;
};

Slopes slopes_at(double x, const ModelParams& p) {
  if (p.externality == 0.0) return {0.0, 0.0};
  const double lo = band_low(p.cost, p);
  const double hi = band_high(p.cost, p);
  const double inside = p.externality / p.affinity_width();
  return {(x > lo && x <= hi) ? inside : 0.0, (x >= lo && x < hi) ? inside : 0.0};
}

Stability stability_from_slopes(double x, const ModelParams& p) {
  const Slopes s = slopes_at(x, p);
  bool stable = true;
  if (x > 0.0) stable = stable && s.left < 1.0;
  if (x < 1.0) stable = stable && s.right < 1.0;
  return stable ? Stability::kStable : Stability::kUnstable;
}

}  // namespace

const char* to_string(Stability s) { return s == Stability::kStable ? "stable" : "unstable"; }

double would_adopt(double x, const ModelParams& p) {
  const double raw = (p.externality * x + p.u_max - p.cost) / p.affinity_width();
  return std::clamp(raw, 0.0, 1.0);
}

double interior_equilibrium(double effective_cost, const ModelParams& p) {
  const double denom = p.u_max - (p.u_min + p.externality);
  if (denom == 0.0) {
    throw SingularParameters("x°(c) is undefined when u_max == u_min + e");
  }
  return (p.u_max - effective_cost) / denom;
}

double band_low(double effective_cost, const ModelParams& p) {
  return (effective_cost - p.u_max) / p.externality;
}

double band_high(double effective_cost, const ModelParams& p) {
  return (effective_cost - p.u_min) / p.externality;
}

int equilibrium_case(const ModelParams& p) {
  const double c = p.cost;
  const double top = p.u_min + p.externality;
  if (std::max(p.u_max, top) <= c) return 1;
  if (top <= c && c <= p.u_max) return 2;
  if (p.u_max <= c && c <= top) return 3;
  return 4;
}

EquilibriumReport classify_equilibria(const ModelParams& p) {
  p.validate();
  EquilibriumReport report;
  report.case_id = equilibrium_case(p);
  if (p.externality > 0.0) {
    report.band_low = band_low(p.cost, p);
    report.band_high = band_high(p.cost, p);
  }

  const bool singular = p.u_max == p.u_min + p.externality;
  if (singular && p.cost == p.u_max) {
    // h(x) == x on the whole band: a continuum of equilibria.
    throw SingularParameters("u_max == u_min + e == c: every level in [0, 1] is an equilibrium");
  }
  if (!singular) report.interior = interior_equilibrium(p.cost, p);

  std::vector<double> levels;
  if (would_adopt(0.0, p) == 0.0) levels.push_back(0.0);
  if (report.interior) {
    const double x = *report.interior;
    if (x > 0.0 && x < 1.0 && std::abs(would_adopt(x, p) - x) <= kConstructedTol) {
      levels.push_back(x);
    }
  }
  if (would_adopt(1.0, p) == 1.0) levels.push_back(1.0);

  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) <= kConstructedTol; }),
               levels.end());
  for (double x : levels) report.equilibria.push_back({x, stability_from_slopes(x, p)});
  return report;
}

Stability stability_of(double x_bar, const ModelParams& p) {
  const double residual = would_adopt(x_bar, p) - x_bar;
  if (!(std::abs(residual) <= kUserTol)) {
    throw NotAnEquilibrium("level " + std::to_string(x_bar) +
                           " is not an equilibrium (h(x) - x = " + std::to_string(residual) + ")");
  }
  return stability_from_slopes(x_bar, p);
}

}  // namespace adoptsub
