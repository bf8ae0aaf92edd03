#include "adoptsub/affinity.hpp"

#include "adoptsub/errors.hpp"

namespace adoptsub {

UniformAffinity::UniformAffinity(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!(lower < upper)) throw InvalidParameters("uniform affinities require lower < upper");
}

double UniformAffinity::ccdf(double u) const {
  if (u <= lower_) return 1.0;
  if (u >= upper_) return 0.0;
  return (upper_ - u) / (upper_ - lower_);
}

double UniformAffinity::density(double u) const {
  if (u < lower_ || u > upper_) return 0.0;
  return 1.0 / (upper_ - lower_);
}

}  // namespace adoptsub
