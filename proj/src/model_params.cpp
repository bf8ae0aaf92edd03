#include "adoptsub/model_params.hpp"

#include <cmath>
#include <string>

#include "adoptsub/errors.hpp"

namespace adoptsub {

void ModelParams::validate() const {
  for (double v : {u_min, u_max, cost, externality, gamma}) {
    if (!std::isfinite(v)) throw InvalidParameters("model parameters must be finite");
  }
  if (!(u_min < u_max)) {
    throw InvalidParameters("uniform affinities require u_min < u_max (got u_min=" +
                            std::to_string(u_min) + ", u_max=" + std::to_string(u_max) + ")");
  }
  if (externality < 0.0) throw InvalidParameters("externality must be >= 0");
  if (!(gamma > 0.0)) throw InvalidParameters("gamma must be > 0");
  if (cost < 0.0) throw InvalidParameters("cost must be >= 0");
}

}  // namespace adoptsub
