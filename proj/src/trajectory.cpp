#include "adoptsub/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adoptsub/errors.hpp"

namespace adoptsub {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

double Segment::value_at(double t) const {
  const double dt = t - start_time;
  return std::visit(
      overloaded{
          [&](const ExponentialApproach& e) {
            if (e.rate == 0.0) return start_level;
            return e.limit + (start_level - e.limit) * std::exp(e.rate * dt);
          },
          [&](const LinearDrift& d) { return start_level + d.slope * dt; },
      },
      shape);
}

PiecewiseTrajectory::PiecewiseTrajectory(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("trajectory needs at least one segment");
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (!(segments_[i].start_time >= segments_[i - 1].start_time)) {
      throw std::invalid_argument("trajectory segments must be ordered by start time");
    }
  }
}

std::vector<double> PiecewiseTrajectory::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) out.push_back(segments_[i].start_time);
  return out;
}

double PiecewiseTrajectory::limit() const {
  const Segment& last = segments_.back();
  return std::visit(overloaded{
                        [&](const ExponentialApproach& e) {
                          return e.rate < 0.0 ? e.limit : last.start_level;
                        },
                        [&](const LinearDrift&) { return last.start_level; },
                    },
                    last.shape);
}

const Segment& PiecewiseTrajectory::active_segment(double t) const {
  if (t < start_time()) {
    throw TimeBeforeStart("time " + std::to_string(t) + " precedes trajectory start " +
                          std::to_string(start_time()));
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.start_time; });
  return *std::prev(it);
}

PiecewiseTrajectory PiecewiseTrajectory::then(double t_end,
                                              const PiecewiseTrajectory& tail) const {
  if (tail.start_time() != t_end) {
    throw std::invalid_argument("tail must start where the head is cut");
  }
  if (t_end <= start_time()) return tail;
  std::vector<Segment> out;
  for (const Segment& s : segments_) {
    if (s.start_time < t_end) out.push_back(s);
  }
  for (const Segment& s : tail.segments()) out.push_back(s);
  return PiecewiseTrajectory(std::move(out));
}

double eval(const PiecewiseTrajectory& traj, double t) {
  return traj.active_segment(t).value_at(t);
}

}  // namespace adoptsub
