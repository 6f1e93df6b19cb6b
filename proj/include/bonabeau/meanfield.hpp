#pragma once

// Deterministic mean-field description of the fully occupied model.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bonabeau/graph.hpp"
#include "bonabeau/params.hpp"

namespace bonabeau {

struct MeanfieldConfig {
  double mu = 0.5;
  double F = 1.0;
  std::size_t n = 1;

  static MeanfieldConfig make(double mu, double F, std::size_t n);

  /// Per-step drift of the mean power, (1 - mu)(1 - F)/n. Zero iff F = 1.
  double drift_const() const noexcept { return (1.0 - mu) * (1.0 - F) / static_cast<double>(n); }
};

/// hbar -> (1 - mu) hbar + drift_const
double mean_step(double hbar, const MeanfieldConfig& cfg) noexcept;

/// Fixed point (1 - mu)(1 - F)/(mu n).
double mean_limit(const MeanfieldConfig& cfg) noexcept;

/// Mean after t applications of mean_step starting from h0:
/// (1-mu)^t h0 + drift_const (1 - (1-mu)^t)/mu.
double mean_closed_form(double h0, std::uint64_t t, const MeanfieldConfig& cfg) noexcept;

/// Expected next state of every agent given the current powers:
///   h_i* = (1 - d_i/|E|)(1-mu) h_i + (1-mu)/|E| sum_{j in N_i} [h_i + (1+F) Q_ij - F]
std::vector<double> meanfield_agent_map(std::span<const double> h, const SiteGraph& g, const BonabeauParams& p);

}  // namespace bonabeau
