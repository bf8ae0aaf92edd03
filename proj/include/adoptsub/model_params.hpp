#pragma once

namespace adoptsub {

// Market parameters. Affinities are Uni(u_min, u_max); all quantities are per
// unit time except gamma, which is the inverse time scale of the dynamics.
struct ModelParams {
  double u_min = 0.0;
  double u_max = 1.0;
  double cost = 0.0;
  double externality = 0.0;
  double gamma = 1.0;

  /// Throws InvalidParameters naming the first broken invariant.
  void validate() const;

  [[nodiscard]] double affinity_width() const { return u_max - u_min; }

  /// Copy with the adoption cost replaced (subsidised cost c - s).
  [[nodiscard]] ModelParams with_cost(double c) const {
    ModelParams p = *this;
    p.cost = c;
    return p;
  }
};

}  // namespace adoptsub
