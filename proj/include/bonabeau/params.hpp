#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bonabeau {

/// Thrown when a model constant is outside its admissible range. The message
/// names the offending parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must lie in (0,1)");
}

inline void require_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("eta must be positive");
}

inline void require_loss(double F) {
  if (!(F >= 1.0) || !std::isfinite(F)) throw ParameterError("F must be >= 1");
}

/// Constants of the Bonabeau fight/relaxation model.
struct BonabeauParams {
  double eta = 1.0;  // Fermi steepness
  double F = 1.0;    // loser's loss
  double mu = 0.5;   // relaxation rate

  static BonabeauParams make(double eta, double F, double mu) {
    require_eta(eta);
    require_loss(F);
    require_mu(mu);
    return {eta, F, mu};
  }

  double coupling() const noexcept { return (1.0 + F) * eta; }
};

}  // namespace bonabeau
