#include "adoptsub/quadrature.hpp"

#include <cmath>

namespace adoptsub {
namespace {

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth,
            QuadratureResult& acc) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
  const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    acc.value += left + right + delta / 15.0;
    acc.error_estimate += std::abs(delta) / 15.0;
    return;
  }
  refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth - 1, acc);
  refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth - 1, acc);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_depth) {
  QuadratureResult acc;
  if (a == b) return acc;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  refine(f, {a, fa, m, fm, b, fb, simpson(a, fa, fm, b, fb)}, tol, max_depth, acc);
  return acc;
}

}  // namespace adoptsub
