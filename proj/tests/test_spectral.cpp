#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bonabeau/graph.hpp"
#include "bonabeau/spectral.hpp"

using namespace bonabeau;

namespace {

// Reference spectrum from Eigen's self-adjoint solver.
std::vector<double> eigen_reference(const DenseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("eigenvalues of small Laplacians") {
  DenseMatrix p2(2);
  p2(0, 0) = 1;
  p2(0, 1) = -1;
  p2(1, 0) = -1;
  p2(1, 1) = 1;
  auto ev = symmetric_eigenvalues(p2);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-12));

  // det(L - x I) = -x (x - 1)(x - 3) for the 3-path
  ev = symmetric_eigenvalues(laplacian(build_family(GraphFamily::path, 3)));
  CHECK(std::abs(ev[0]) < 1e-12);
  CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("star and complete graphs have lambda1 = n") {
  for (std::size_t n : {2, 3, 5, 10, 50, 100}) {
    CHECK(laplacian_lambda1(build_family(GraphFamily::star, n)) == doctest::Approx(double(n)).epsilon(1e-10));
    CHECK(laplacian_lambda1(build_family(GraphFamily::complete, n)) == doctest::Approx(double(n)).epsilon(1e-10));
  }
}

TEST_CASE("Jacobi agrees with Eigen") {
  Rng rng(2024);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 1 + rng.index(60);
    const auto g = random_connected(n, rng.index(3 * n + 1), rng);
    const DenseMatrix L = laplacian(g);
    CHECK(max_abs_diff(symmetric_eigenvalues(L), eigen_reference(L)) < 1e-9);
  }
  // dense random symmetric matrices with mixed signs
  for (int k = 0; k < 10; ++k) {
    const std::size_t n = 2 + rng.index(30);
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = 2.0 * rng.uniform() - 1.0;
    CHECK(max_abs_diff(symmetric_eigenvalues(m), eigen_reference(m)) < 1e-10);
  }
}

TEST_CASE("symmetric_eigenvalues input checks") {
  CHECK_THROWS_AS(symmetric_eigenvalues(DenseMatrix(0)), SpectralError);
  DenseMatrix asym(2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(symmetric_eigenvalues(asym), SpectralError);
  DenseMatrix one(1);
  one(0, 0) = -3.5;
  CHECK(symmetric_eigenvalues(one) == std::vector<double>{-3.5});
}

TEST_CASE("Das bound examples") {
  CHECK(das_bound(build_family(GraphFamily::star, 5)) == 5.0);
  CHECK(das_bound(build_family(GraphFamily::path, 30)) == 4.0);
  for (std::size_t n : {3, 6, 11}) CHECK(das_bound(build_family(GraphFamily::complete, n)) == double(n));
  CHECK_THROWS(das_bound(SiteGraph::from_edges(3, {})));
}

TEST_CASE("Laplacian to Jacobian eigenvalue map") {
  const auto p = BonabeauParams::make(1.0, 1.0, 0.2);
  CHECK(jacobian_eig_from_laplacian(0.0, p, 99) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(jacobian_eig_from_laplacian(100.0, p, 99) == doctest::Approx(0.8 * (1.0 + 200.0 / 396.0)).epsilon(1e-14));
  CHECK(std::abs(jacobian_eig_from_laplacian(100.0, p, 99) - 1.2040404040404042) < 1e-12);
  CHECK(jacobian_coefficient(p, 99) == doctest::Approx(2.0 / 396.0));
}

TEST_CASE("star n=100 stability reports") {
  const auto star = build_family(GraphFamily::star, 100);
  const auto r02 = stability_report(star, BonabeauParams::make(1.0, 1.0, 0.2));
  // 0.8 * (1 + 100 * 2 / 396)
  CHECK(std::abs(r02.indicator - 0.8 * (1.0 + 200.0 / 396.0)) < 1e-9);
  CHECK(r02.classification == Classification::unstable);
  const auto r04 = stability_report(star, BonabeauParams::make(1.0, 1.0, 0.4));
  CHECK(std::abs(r04.indicator - 0.6 * (1.0 + 200.0 / 396.0)) < 1e-9);
  CHECK(std::abs(r04.indicator - 0.90303030303) < 1e-9);
  CHECK(r04.classification == Classification::stable);

  // (1 - mu)(1 + c) = 1  =>  mu = c / (1 + c), c = 200/396
  const double c = 200.0 / 396.0;
  CHECK(std::abs(r02.critical_mu() - c / (1.0 + c)) < 1e-12);
  CHECK(std::abs(r02.critical_mu() - 0.33557) < 1e-5);
  // critical coupling 4 mu |E| / (lambda1 (1 - mu)) = 4*0.2*99/(100*0.8)
  CHECK(std::abs(r02.critical_coupling - 0.99) < 1e-9);
  const auto marginal = stability_report(star, BonabeauParams::make(1.0, 1.0, c / (1.0 + c)));
  CHECK(marginal.classification == Classification::marginal);
}

TEST_CASE("stability_report rejects disconnected graphs") {
  const std::vector<Edge> two{{0, 1}, {2, 3}};
  CHECK_THROWS_AS(stability_report(SiteGraph::from_edges(4, two), BonabeauParams{}), SpectralError);
  CHECK_THROWS(stability_report(SiteGraph::from_edges(1, {}), BonabeauParams{}));
}

TEST_CASE("classify uses a marginal band") {
  CHECK(classify(1.0) == Classification::marginal);
  CHECK(classify(1.0 + 5e-10) == Classification::marginal);
  CHECK(classify(1.0 + 2e-9) == Classification::unstable);
  CHECK(classify(1.0 - 2e-9) == Classification::stable);
}

TEST_CASE("large-n threshold") {
  CHECK(large_n_threshold(1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(large_n_threshold(0.5) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(large_n_threshold(1e-12) < 1e-11);
  CHECK(limiting_critical_mu(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(limiting_critical_mu(2.5) == doctest::Approx(2.5 / 6.5).epsilon(1e-14));
  CHECK(limiting_critical_mu(4.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("spectral properties on random connected graphs") {
  Rng rng(99);
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 2 + rng.index(60);
    const auto g = random_connected(n, rng.index(2 * n), rng);
    const double l1 = laplacian_lambda1(g);
    const double m = static_cast<double>(g.edge_count());
    const double nn = static_cast<double>(n);
    CHECK(l1 <= das_bound(g) + 1e-9);
    CHECK(das_bound(g) <= nn);
    CHECK(l1 / m <= nn / (nn - 1.0) + 1e-9);

    const auto p = BonabeauParams::make(0.5 + 2.0 * rng.uniform(), 1.0 + 2.0 * rng.uniform(),
                                        0.05 + 0.9 * rng.uniform());
    const auto lap = symmetric_eigenvalues(laplacian(g));
    std::vector<double> mapped;
    for (double b : lap) mapped.push_back(jacobian_eig_from_laplacian(std::max(b, 0.0), p, g.edge_count()));
    std::sort(mapped.begin(), mapped.end());
    const auto jac = symmetric_eigenvalues(build_jacobian(g, p));
    CHECK(max_abs_diff(jac, mapped) < 1e-8);
    CHECK(jac.front() >= (1.0 - p.mu) - 1e-9);
  }
}

TEST_CASE("classification is invariant under relabeling") {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 2 + rng.index(25);
    const auto g = random_connected(n, n / 3, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    const auto p = BonabeauParams::make(1.0, 1.0 + rng.uniform(), 0.05 + 0.9 * rng.uniform());
    const auto a = stability_report(g, p);
    const auto b = stability_report(relabel(g, perm), p);
    CHECK(a.classification == b.classification);
    CHECK(a.indicator == doctest::Approx(b.indicator).epsilon(1e-12));
  }
}

TEST_CASE("star threshold approaches the large-n value") {
  // critical coupling on a star is 4 mu (n - 1) / (n (1 - mu)), increasing to 4 mu / (1 - mu)
  const double mu = 0.3;
  double previous = 0.0;
  for (std::size_t n : {10, 100, 1000}) {
    const auto r = stability_report(build_family(GraphFamily::star, n), BonabeauParams::make(1.0, 1.0, mu));
    const double expected = 4.0 * mu * double(n - 1) / (double(n) * (1.0 - mu));
    CHECK(std::abs(r.critical_coupling - expected) < 1e-9);
    CHECK(r.critical_coupling > previous);
    CHECK(r.critical_coupling < large_n_threshold(mu));
    previous = r.critical_coupling;
  }
}

TEST_CASE("stability CSV row") {
  const auto r = stability_report(build_family(GraphFamily::star, 100), BonabeauParams::make(1.0, 1.0, 0.2));
  CHECK(stability_csv_header() ==
        "graph_id,n,edge_count,lambda1,mu,eta,F,indicator,classification,critical_coupling");
  const std::string row = to_csv_row(r);
  CHECK(row.rfind("star-100,100,99,", 0) == 0);
  CHECK(row.find(",unstable,") != std::string::npos);
}
