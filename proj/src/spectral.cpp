#include "bonabeau/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "bonabeau/csv.hpp"

namespace bonabeau {

namespace {

constexpr std::size_t kMaxDimension = 2048;
constexpr int kMaxSweeps = 100;

}  // namespace

std::vector<double> symmetric_eigenvalues(const DenseMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw SpectralError("eigenvalues of an empty matrix");
  if (n > kMaxDimension) throw SpectralError("matrix dimension exceeds 2048");

  double scale = 0.0;
  for (double x : m.data()) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(1.0, scale)) {
        throw SpectralError("matrix is not symmetric");
      }
    }
  }

  // Work on the strict upper triangle; d holds the diagonal, z accumulates
  // the diagonal updates of the current sweep (Rutishauser's variant).
  DenseMatrix a = m;
  std::vector<double> d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = b[i] = a(i, i);

  double frobenius = 0.0;
  for (double x : m.data()) frobenius += x * x;
  frobenius = std::sqrt(frobenius);
  const double target = 1e-12 * std::max(frobenius, 1e-300);

  auto rotate = [](double& g, double& h, double s, double tau) {
    const double gg = g;
    const double hh = h;
    g = gg - s * (hh + gg * tau);
    h = hh + s * (gg - hh * tau);
  };

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      auto row = a.row(p);
      for (std::size_t q = p + 1; q < n; ++q) off += row[q] * row[q];
    }
    if (std::sqrt(2.0 * off) < target) break;

    // Early sweeps skip small elements; later sweeps rotate everything that
    // is not negligible against both diagonal entries.
    const double threshold = sweep < 3 ? 0.2 * std::sqrt(2.0 * off) / static_cast<double>(n * n) : 0.0;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(d[p]) + g == std::abs(d[p]) && std::abs(d[q]) + g == std::abs(d[q])) {
          a(p, q) = 0.0;
          continue;
        }
        if (std::abs(apq) <= threshold || apq == 0.0) continue;

        const double diff = d[q] - d[p];
        double t;
        if (std::abs(diff) + g == std::abs(diff)) {
          t = apq / diff;
        } else {
          const double theta = 0.5 * diff / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double h = t * apq;
        z[p] -= h;
        z[q] += h;
        d[p] -= h;
        d[q] += h;
        a(p, q) = 0.0;

        for (std::size_t j = 0; j < p; ++j) rotate(a(j, p), a(j, q), s, tau);
        for (std::size_t j = p + 1; j < q; ++j) rotate(a(p, j), a(j, q), s, tau);
        auto row_p = a.row(p);
        auto row_q = a.row(q);
        for (std::size_t j = q + 1; j < n; ++j) rotate(row_p[j], row_q[j], s, tau);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      b[i] += z[i];
      d[i] = b[i];
      z[i] = 0.0;
    }
  }

  std::sort(d.begin(), d.end());
  return d;
}

double laplacian_lambda1(const SiteGraph& g) { return symmetric_eigenvalues(laplacian(g)).back(); }

double das_bound(const SiteGraph& g) {
  if (g.edge_count() == 0) throw SpectralError("das_bound needs at least one edge");
  std::size_t best = 0;
  for (const Edge& e : g.edges()) {
    auto nu = g.neighbors(e.u);
    auto nv = g.neighbors(e.v);
    std::size_t common = 0;
    // Both lists are sorted.
    for (auto i = nu.begin(), j = nv.begin(); i != nu.end() && j != nv.end();) {
      if (*i < *j) ++i;
      else if (*j < *i) ++j;
      else { ++common; ++i; ++j; }
    }
    best = std::max(best, nu.size() + nv.size() - common);
  }
  return static_cast<double>(best);
}

double jacobian_coefficient(const BonabeauParams& p, std::size_t edge_count) {
  require_mu(p.mu);
  require_eta(p.eta);
  require_loss(p.F);
  if (edge_count == 0) throw SpectralError("edge_count must be >= 1");
  return p.coupling() / (4.0 * static_cast<double>(edge_count));
}

double jacobian_eig_from_laplacian(double b, const BonabeauParams& p, std::size_t edge_count) {
  const double a = jacobian_coefficient(p, edge_count);
  if (b < 0.0) throw SpectralError("Laplacian eigenvalue must be non-negative");
  return (1.0 - p.mu) * (1.0 + a * b);
}

DenseMatrix build_jacobian(const SiteGraph& g, const BonabeauParams& p) {
  const double a = jacobian_coefficient(p, g.edge_count());
  const double relax = 1.0 - p.mu;
  DenseMatrix J(g.order());
  for (std::size_t i = 0; i < g.order(); ++i) {
    J(i, i) = relax * (1.0 + a * static_cast<double>(g.degree(i)));
    for (std::size_t j : g.neighbors(i)) J(i, j) = -relax * a;
  }
  return J;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::stable: return "stable";
    case Classification::unstable: return "unstable";
    case Classification::marginal: return "marginal";
  }
  return "?";
}

Classification classify(double indicator) {
  if (indicator < 1.0 - kMarginalTolerance) return Classification::stable;
  if (indicator > 1.0 + kMarginalTolerance) return Classification::unstable;
  return Classification::marginal;
}

double StabilityReport::critical_mu() const noexcept {
  const double c = lambda1 * a_coeff;
  return c / (1.0 + c);
}

StabilityReport stability_report(const SiteGraph& g, const BonabeauParams& p) {
  if (g.edge_count() == 0) throw SpectralError("stability needs at least one edge");
  if (!is_connected(g)) throw SpectralError("graph '" + g.label() + "' is disconnected; analyze each component");
  StabilityReport r;
  r.graph_id = g.label();
  r.n = g.order();
  r.edge_count = g.edge_count();
  r.params = p;
  r.lambda1 = laplacian_lambda1(g);
  r.a_coeff = jacobian_coefficient(p, g.edge_count());
  r.indicator = (1.0 - p.mu) * (1.0 + r.lambda1 * r.a_coeff);
  r.classification = classify(r.indicator);
  r.critical_coupling = 4.0 * p.mu * static_cast<double>(r.edge_count) / (r.lambda1 * (1.0 - p.mu));
  return r;
}

double large_n_threshold(double mu) {
  require_mu(mu);
  return 4.0 * mu / (1.0 - mu);
}

double limiting_critical_mu(double coupling) { return coupling / (4.0 + coupling); }

std::string stability_csv_header() {
  return "graph_id,n,edge_count,lambda1,mu,eta,F,indicator,classification,critical_coupling";
}

std::string to_csv_row(const StabilityReport& r) {
  return csv_join({r.graph_id, std::to_string(r.n), std::to_string(r.edge_count), fmt17(r.lambda1),
                   fmt17(r.params.mu), fmt17(r.params.eta), fmt17(r.params.F), fmt17(r.indicator),
                   std::string(to_string(r.classification)), fmt17(r.critical_coupling)});
}

}  // namespace bonabeau
