#include "bonabeau/meanfield.hpp"

#include <cmath>

#include "bonabeau/bonabeau_engine.hpp"

namespace bonabeau {

MeanfieldConfig MeanfieldConfig::make(double mu, double F, std::size_t n) {
  require_mu(mu);
  require_loss(F);
  if (n == 0) throw ParameterError("n must be >= 1");
  return {mu, F, n};
}

double mean_step(double hbar, const MeanfieldConfig& cfg) noexcept {
  return (1.0 - cfg.mu) * hbar + cfg.drift_const();
}

double mean_limit(const MeanfieldConfig& cfg) noexcept {
  return (1.0 - cfg.mu) * (1.0 - cfg.F) / (cfg.mu * static_cast<double>(cfg.n));
}

double mean_closed_form(double h0, std::uint64_t t, const MeanfieldConfig& cfg) noexcept {
  const double decay = std::pow(1.0 - cfg.mu, static_cast<double>(t));
  return decay * h0 + cfg.drift_const() * (1.0 - decay) / cfg.mu;
}

std::vector<double> meanfield_agent_map(std::span<const double> h, const SiteGraph& g, const BonabeauParams& p) {
  if (g.edge_count() == 0) throw GraphError("mean-field map needs at least one edge");
  if (h.size() != g.order()) throw ParameterError("power vector length must equal the vertex count");
  const double edges = static_cast<double>(g.edge_count());
  const double relax = 1.0 - p.mu;
  std::vector<double> next(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    double fights = 0.0;
    for (std::size_t j : g.neighbors(i)) {
      fights += h[i] + (1.0 + p.F) * fight_probability(h[i], h[j], p.eta) - p.F;
    }
    next[i] = (1.0 - static_cast<double>(g.degree(i)) / edges) * relax * h[i] + relax / edges * fights;
  }
  return next;
}

}  // namespace bonabeau
