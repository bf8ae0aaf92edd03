#pragma once

#include <span>
#include <variant>
#include <vector>

namespace adoptsub {

// x(t) = limit + (x_k - limit) * exp(rate * (t - t_k))
struct ExponentialApproach {
  double limit = 0.0;
  double rate = 0.0;
};

// x(t) = x_k + slope * (t - t_k)
struct LinearDrift {
  double slope = 0.0;
};

using SegmentShape = std::variant<ExponentialApproach, LinearDrift>;

struct Segment {
  double start_time = 0.0;
  double start_level = 0.0;
  SegmentShape shape;

  [[nodiscard]] double value_at(double t) const;
};

// Exact piecewise adoption path. Segments are contiguous and ordered by start
// time; the last one extends to +infinity.
class PiecewiseTrajectory {
 public:
  /// Throws std::invalid_argument when empty or not ordered by start time.
  explicit PiecewiseTrajectory(std::vector<Segment> segments);

  [[nodiscard]] double start_time() const { return segments_.front().start_time; }
  [[nodiscard]] double start_level() const { return segments_.front().start_level; }
  [[nodiscard]] std::span<const Segment> segments() const { return segments_; }

  /// Segment start times after the first one.
  [[nodiscard]] std::vector<double> breakpoints() const;

  /// Level approached as t -> infinity.
  [[nodiscard]] double limit() const;

  /// Restriction to [start_time, t_end] followed by `tail`, which must start
  /// at t_end.
  [[nodiscard]] PiecewiseTrajectory then(double t_end, const PiecewiseTrajectory& tail) const;

  [[nodiscard]] const Segment& active_segment(double t) const;

 private:
  std::vector<Segment> segments_;
};

/// Exact level at time t. Throws TimeBeforeStart when t < start_time().
double eval(const PiecewiseTrajectory& traj, double t);

}  // namespace adoptsub
