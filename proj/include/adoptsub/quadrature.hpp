#pragma once

#include <functional>

namespace adoptsub {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_depth = 50);

}  // namespace adoptsub
