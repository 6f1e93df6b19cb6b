#pragma once

// Laplacian spectra and the linear stability of the egalitarian state.
//
// Around the uniform state the one-step mean-field map has Jacobian
//   J = (1 - mu) (a L + I),   a = (1 + F) eta / (4 |E|),
// so each Laplacian eigenvalue b maps to (1 - mu)(1 + a b) and the dominant
// one is governed by lambda1, the largest Laplacian eigenvalue.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bonabeau/graph.hpp"
#include "bonabeau/matrix.hpp"
#include "bonabeau/params.hpp"

namespace bonabeau {

class SpectralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Full spectrum of a symmetric matrix, ascending, by cyclic Jacobi rotations.
/// Throws SpectralError for empty, oversized (> 2048) or asymmetric input.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& m);

/// Largest Laplacian eigenvalue.
double laplacian_lambda1(const SiteGraph& g);

/// max over edges (i,j) of d_i + d_j - |N_i ∩ N_j|, an upper bound on lambda1.
double das_bound(const SiteGraph& g);

/// (1 + F) eta / (4 |E|)
double jacobian_coefficient(const BonabeauParams& p, std::size_t edge_count);

/// Jacobian eigenvalue (1 - mu)(1 + a b) for Laplacian eigenvalue b.
double jacobian_eig_from_laplacian(double b, const BonabeauParams& p, std::size_t edge_count);

/// Jacobian of the mean-field map at the uniform state.
DenseMatrix build_jacobian(const SiteGraph& g, const BonabeauParams& p);

enum class Classification { stable, unstable, marginal };
std::string_view to_string(Classification c);

inline constexpr double kMarginalTolerance = 1e-9;

Classification classify(double indicator);

struct StabilityReport {
  std::string graph_id;
  std::size_t n = 0;
  std::size_t edge_count = 0;
  double lambda1 = 0.0;
  BonabeauParams params;
  double a_coeff = 0.0;
  double indicator = 0.0;          // (1-mu)[1 + lambda1 a]
  Classification classification = Classification::marginal;
  double critical_coupling = 0.0;  // (1+F) eta at which indicator == 1

  /// Relaxation rate at which the indicator crosses 1 for this graph and
  /// coupling: mu* = c / (1 + c), c = lambda1 a.
  double critical_mu() const noexcept;
};

/// Stability of the egalitarian state on a connected graph with |E| >= 1.
/// Disconnected graphs throw; analyze each component separately.
StabilityReport stability_report(const SiteGraph& g, const BonabeauParams& p);

/// Large-n critical coupling 4 mu / (1 - mu).
double large_n_threshold(double mu);

/// mu at which (1+F) eta equals the large-n threshold: c / (4 + c).
double limiting_critical_mu(double coupling);

std::string stability_csv_header();
/// graph_id,n,edge_count,lambda1,mu,eta,F,indicator,classification,critical_coupling
std::string to_csv_row(const StabilityReport& r);

}  // namespace bonabeau
