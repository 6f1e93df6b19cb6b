#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "bonabeau/competing.hpp"

using namespace bonabeau;

namespace {

std::int64_t total(const CompetingState& s) { return std::accumulate(s.h.begin(), s.h.end(), std::int64_t{0}); }

// Direct double sum over ordered pairs; independent of the closed form used
// by z_statistic.
std::int64_t z_by_pairs(const CompetingState& s) {
  std::int64_t z = 0;
  for (std::int64_t a : s.h)
    for (std::int64_t b : s.h) z += (a - b) * (a - b);
  return z;
}

}  // namespace

TEST_CASE("eta schedules") {
  CHECK(EtaSchedule::constant(2.0).at(0) == 2.0);
  CHECK(EtaSchedule::constant(2.0).at(1'000'000) == 2.0);
  const auto s = EtaSchedule::piecewise({{0, 1.0}, {10, 3.0}, {100, 0.5}});
  CHECK(s.at(0) == 1.0);
  CHECK(s.at(9) == 1.0);
  CHECK(s.at(10) == 3.0);
  CHECK(s.at(99) == 3.0);
  CHECK(s.at(100) == 0.5);
  CHECK(s.at(1u << 30) == 0.5);
  CHECK_THROWS_AS(EtaSchedule::piecewise({{5, 1.0}}), ParameterError);
  CHECK_THROWS_AS(EtaSchedule::piecewise({{0, 1.0}, {0, 2.0}}), ParameterError);
  CHECK_THROWS_AS(EtaSchedule::piecewise({{0, -1.0}}), ParameterError);
  CHECK_THROWS_AS(EtaSchedule::constant(0.0), ParameterError);
}

TEST_CASE("params validation") {
  CompetingParams p;
  p.ell = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("single edge from zero") {
  const auto g = build_family(GraphFamily::complete, 2);
  const CompetingParams p;
  Rng rng(3);
  int first_up = 0;
  for (int k = 0; k < 2000; ++k) {
    CompetingState s = CompetingState::zeros(2);
    const auto e = step_competing(s, g, p, rng);
    REQUIRE(e);
    CHECK((s.h == std::vector<std::int64_t>{1, -1} || s.h == std::vector<std::int64_t>{-1, 1}));
    CHECK(s.absorbed(e->loser(), 1));
    CHECK(is_terminal(s, g, 1));
    first_up += s.h[0] == 1 ? 1 : 0;
  }
  CHECK(std::abs(first_up - 1000) < 4 * std::sqrt(500.0));
}

TEST_CASE("absorbed endpoints make the step a no-op") {
  const auto g = build_family(GraphFamily::complete, 2);
  CompetingParams p;
  p.ell = 2;
  Rng rng(1);
  CompetingState s{{-2, 2}, 5};
  const auto e = step_competing(s, g, p, rng);
  CHECK_FALSE(e);
  CHECK(s.h == std::vector<std::int64_t>{-2, 2});
  CHECK(s.t == 6);
}

TEST_CASE("terminal condition") {
  const auto tri = build_family(GraphFamily::complete, 3);
  CHECK(is_terminal(CompetingState{{-1, -1, -1}, 0}, tri, 1));
  CHECK(is_terminal(CompetingState{{1, -1}, 0}, build_family(GraphFamily::complete, 2), 1));
  CHECK_FALSE(is_terminal(CompetingState{{1, 1, -2}, 0}, tri, 2));
  // middle of a path absorbed leaves two non-adjacent survivors
  CHECK(is_terminal(CompetingState{{1, -2, 1}, 0}, build_family(GraphFamily::path, 3), 2));
}

TEST_CASE("Z statistic") {
  CHECK(z_statistic(CompetingState::zeros(5)) == 0);
  CHECK(z_statistic(CompetingState{{1, -1}, 0}) == 8);
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    CompetingState s = CompetingState::zeros(1 + rng.index(12));
    for (auto& x : s.h) x = static_cast<std::int64_t>(rng.index(41)) - 20;
    CHECK(z_statistic(s) == z_by_pairs(s));
  }
}

TEST_CASE("z_increment matches recomputation") {
  // fight between p (winner) and q (loser) on n agents
  Rng rng(4);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + rng.index(10);
    CompetingState s = CompetingState::zeros(n);
    for (auto& x : s.h) x = static_cast<std::int64_t>(rng.index(21)) - 10;
    const std::size_t w = rng.index(n);
    std::size_t l = rng.index(n - 1);
    if (l >= w) ++l;
    CompetingState next = s;
    next.h[w] += 1;
    next.h[l] -= 1;
    CHECK(z_by_pairs(next) - z_by_pairs(s) == z_increment(n, 1, s.h[w], s.h[l]));
    // the loser's view gives the same increment
    CHECK(z_increment(n, -1, s.h[l], s.h[w]) == z_increment(n, 1, s.h[w], s.h[l]));
  }
}

TEST_CASE("conservation and bounds along long runs") {
  Rng rng(5);
  for (std::int64_t ell : {1, 2, 3}) {
    for (auto selection : {EdgeSelection::all_edges, EdgeSelection::fightable_edges}) {
      const auto g = random_connected(9, 6, rng);
      CompetingParams p;
      p.ell = ell;
      p.selection = selection;
      p.eta = EtaSchedule::piecewise({{0, 0.5}, {50, 2.0}});
      CompetingState s = CompetingState::zeros(9);
      std::vector<bool> out(9, false);
      bool was_terminal = false;
      for (int k = 0; k < 20000; ++k) {
        const auto e = step_competing(s, g, p, rng);
        if (e) {
          CHECK_FALSE(out[e->attacker]);
          CHECK_FALSE(out[e->defender]);
          CHECK(g.adjacent(e->attacker, e->defender));
        }
        CHECK(total(s) == 0);
        for (std::size_t i = 0; i < 9; ++i) {
          CHECK(s.h[i] >= -ell);
          CHECK(s.h[i] <= 8 * ell);
          out[i] = s.absorbed(i, ell);
        }
        if (was_terminal) CHECK(is_terminal(s, g, ell));
        was_terminal = is_terminal(s, g, ell);
      }
      CHECK(was_terminal);
    }
  }
}

TEST_CASE("n = 2 terminates after one fight") {
  const auto g = build_family(GraphFamily::complete, 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = run_to_termination(g, CompetingParams{}, rng);
    CHECK(r.terminal);
    CHECK(r.fights == 1);
    CHECK(r.steps == 1);
    CHECK(r.final_z == 8);
  }
}

TEST_CASE("run_to_termination tracks Z and terminates") {
  Rng rng(6);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 2 + rng.index(10);
    const auto g = random_connected(n, rng.index(n), rng);
    CompetingParams p;
    p.ell = 1 + static_cast<std::int64_t>(rng.index(3));
    const auto r = run_to_termination(g, p, rng);
    CHECK(r.terminal);
    CHECK(is_terminal(r.final_state, g, p.ell));
    CHECK(r.z_trace.size() == r.fights);
    CHECK(r.z_trace.back() == r.final_z);
    CHECK(r.final_z == z_by_pairs(r.final_state));
    CHECK(sigma(r.final_state) > 0.0);
    const auto n64 = static_cast<std::int64_t>(n);
    CHECK(r.final_z <= n64 * n64 * (n64 * p.ell) * (n64 * p.ell));
  }
}

TEST_CASE("path of 10 with ell = 2 always terminates") {
  const auto g = build_family(GraphFamily::path, 10);
  CompetingParams p;
  p.ell = 2;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    CHECK(run_to_termination(g, p, rng, kDefaultStepCap, false).terminal);
  }
}

TEST_CASE("step cap is reported") {
  Rng rng(1);
  const auto r = run_to_termination(build_family(GraphFamily::complete, 8), CompetingParams{}, rng, 3);
  CHECK_FALSE(r.terminal);
  CHECK(r.steps == 3);
}

TEST_CASE("termination CSV") {
  CHECK(termination_csv_header() == "graph_id,n,ell,seed,terminal,steps,fights,final_Z,final_sigma");
  Rng rng(0);
  const auto r = run_to_termination(build_family(GraphFamily::complete, 2), CompetingParams{}, rng);
  CHECK(termination_csv_row("complete-2", 2, 1, 0, r) == "complete-2,2,1,0,true,1,1,8,1");
}
