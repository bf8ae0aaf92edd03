#pragma once

namespace adoptsub {

// Distribution of user service affinities U.
class AffinityDistribution {
 public:
  virtual ~AffinityDistribution() = default;

  /// P(U > u); continuous and nonincreasing.
  [[nodiscard]] virtual double ccdf(double u) const = 0;
  [[nodiscard]] virtual double density(double u) const = 0;
};

class UniformAffinity final : public AffinityDistribution {
 public:
  /// Throws InvalidParameters unless lower < upper.
  UniformAffinity(double lower, double upper);

  [[nodiscard]] double ccdf(double u) const override;
  [[nodiscard]] double density(double u) const override;

  [[nodiscard]] double lower() const { return lower_; }
  [[nodiscard]] double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace adoptsub
