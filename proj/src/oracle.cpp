#include "bonabeau/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "bonabeau/meanfield.hpp"
#include "bonabeau/spectral.hpp"

namespace bonabeau {

long double StepDistribution::total_probability() const {
  long double total = 0.0L;
  for (const auto& o : outcomes) total += o.probability;
  return total;
}

namespace {

bool active_edge(const CompetingState& s, const Edge& e, std::int64_t ell) {
  return !s.absorbed(e.u, ell) && !s.absorbed(e.v, ell);
}

void add_fight_branches(const CompetingState& state, const Edge& e, long double edge_probability,
                        const CompetingParams& p, StepDistribution& dist) {
  for (int role = 0; role < 2; ++role) {
    const std::size_t attacker = role == 0 ? e.u : e.v;
    const std::size_t defender = role == 0 ? e.v : e.u;
    const long double q = fight_probability(static_cast<double>(state.h[attacker]),
                                            static_cast<double>(state.h[defender]), p.eta.at(state.t));
    for (int won = 0; won < 2; ++won) {
      StepBranch b;
      b.fight = true;
      b.attacker = attacker;
      b.defender = defender;
      b.attacker_won = won == 1;
      b.probability = edge_probability * 0.5L * (b.attacker_won ? q : 1.0L - q);
      b.next = state;
      ++b.next.t;
      const std::size_t winner = b.attacker_won ? attacker : defender;
      const std::size_t loser = b.attacker_won ? defender : attacker;
      b.next.h[winner] += 1;
      b.next.h[loser] -= p.loser_loss;
      dist.fight_probability += b.probability;
      dist.branches.push_back(std::move(b));
    }
  }
}

void add_noop_branch(const CompetingState& state, long double probability, StepDistribution& dist) {
  StepBranch b;
  b.probability = probability;
  b.next = state;
  ++b.next.t;
  dist.branches.push_back(std::move(b));
}

}  // namespace

StepDistribution enumerate_competing_step(const CompetingState& state, const SiteGraph& g, const CompetingParams& p) {
  if (state.size() > kMaxEnumerationAgents) {
    throw OracleError("enumeration limited to " + std::to_string(kMaxEnumerationAgents) + " agents");
  }
  if (g.edge_count() == 0) throw GraphError("competing dynamics needs at least one edge");
  p.validate();
  StepDistribution dist;
  if (p.selection == EdgeSelection::all_edges) {
    const long double pe = 1.0L / static_cast<long double>(g.edge_count());
    for (const Edge& e : g.edges()) {
      if (active_edge(state, e, p.ell)) add_fight_branches(state, e, pe, p, dist);
      else add_noop_branch(state, pe, dist);
    }
  } else {
    std::vector<Edge> live;
    for (const Edge& e : g.edges()) {
      if (active_edge(state, e, p.ell)) live.push_back(e);
    }
    if (live.empty()) add_noop_branch(state, 1.0L, dist);
    const long double pe = live.empty() ? 0.0L : 1.0L / static_cast<long double>(live.size());
    for (const Edge& e : live) add_fight_branches(state, e, pe, p, dist);
  }

  std::map<std::vector<std::int64_t>, long double> merged;
  for (const auto& b : dist.branches) merged[b.next.h] += b.probability;
  for (auto& [next, prob] : merged) dist.outcomes.push_back({next, prob});
  return dist;
}

ZExpectation expected_z_increment(const CompetingState& state, const SiteGraph& g, const CompetingParams& p) {
  const StepDistribution dist = enumerate_competing_step(state, g, p);
  const std::int64_t z0 = z_statistic(state);
  ZExpectation e;
  for (const auto& o : dist.outcomes) {
    const CompetingState next{o.next, state.t + 1};
    e.expected_increment += o.probability * static_cast<long double>(z_statistic(next) - z0);
  }
  e.lower_bound = 4.0L * static_cast<long double>(state.size()) * dist.fight_probability;
  return e;
}

bool fightable_pairs_level(const CompetingState& state, const SiteGraph& g, std::int64_t ell) {
  return std::all_of(g.edges().begin(), g.edges().end(), [&](const Edge& e) {
    return !active_edge(state, e, ell) || state.h[e.u] == state.h[e.v];
  });
}

DenseMatrix finite_difference_jacobian(const VectorMap& map, std::span<const double> point, double eps) {
  if (!(eps >= 1e-8 && eps <= 1e-4)) throw OracleError("finite-difference eps must lie in [1e-8, 1e-4]");
  const std::size_t n = point.size();
  DenseMatrix J(n);
  std::vector<double> x(point.begin(), point.end());
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = point[j] + eps;
    const auto plus = map(x);
    x[j] = point[j] - eps;
    const auto minus = map(x);
    x[j] = point[j];
    for (std::size_t i = 0; i < n; ++i) J(i, j) = (plus[i] - minus[i]) / (2.0 * eps);
  }
  return J;
}

double empirical_vs_exact(const CompetingState& state, const SiteGraph& g, const CompetingParams& p,
                          std::size_t samples, Rng& rng) {
  if (samples == 0) throw OracleError("samples must be positive");
  const StepDistribution dist = enumerate_competing_step(state, g, p);
  std::map<std::vector<std::int64_t>, std::size_t> counts;
  for (std::size_t k = 0; k < samples; ++k) {
    CompetingState s = state;
    step_competing(s, g, p, rng);
    ++counts[s.h];
  }
  long double tv = 0.0L;
  for (const auto& o : dist.outcomes) {
    const auto it = counts.find(o.next);
    const long double emp = it == counts.end() ? 0.0L : static_cast<long double>(it->second) / samples;
    tv += std::fabs(emp - o.probability);
    if (it != counts.end()) counts.erase(it);
  }
  for (const auto& [next, c] : counts) tv += static_cast<long double>(c) / samples;
  return static_cast<double>(0.5L * tv);
}

std::vector<CompetingState> reachable_states(const SiteGraph& g, const CompetingParams& p, std::size_t count,
                                             Rng& rng) {
  std::vector<CompetingState> states;
  states.reserve(count);
  // Each pick is a uniformly chosen point of an independent trajectory run
  // until it is terminal (or hits the horizon), so early, mid-run and
  // terminal states all appear.
  const std::uint64_t horizon = 20 * g.edge_count() * static_cast<std::uint64_t>(p.ell) + 1;
  std::vector<CompetingState> path;
  for (std::size_t k = 0; k < count; ++k) {
    path.assign(1, CompetingState::zeros(g.order()));
    while (path.size() <= horizon && !is_terminal(path.back(), g, p.ell)) {
      CompetingState next = path.back();
      step_competing(next, g, p, rng);
      path.push_back(std::move(next));
    }
    states.push_back(path[rng.index(path.size())]);
  }
  return states;
}

std::uint64_t state_hash(const CompetingState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t x : state.h) {
    auto u = static_cast<std::uint64_t>(x);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (u >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

bool VerificationReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

std::string VerificationReport::to_text() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %-16s %22s %22s %22s  %s\n", "suite", "state", "value", "bound", "margin",
                "result");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-18s %016llx %22.15g %22.15g %22.15g  %s", r.suite.c_str(),
                  static_cast<unsigned long long>(r.state_hash), r.value, r.bound, r.margin, r.pass ? "pass" : "FAIL");
    out += line;
    if (!r.note.empty()) out += "  " + r.note;
    out += '\n';
  }
  std::size_t failures = 0;
  for (const auto& r : rows) failures += r.pass ? 0 : 1;
  std::snprintf(line, sizeof line, "checks: %zu  failures: %zu  overall: %s\n", rows.size(), failures,
                failures == 0 ? "PASS" : "FAIL");
  out += line;
  return out;
}

void verify_submartingale(std::span<const CompetingState> states, const SiteGraph& g, const CompetingParams& p,
                          VerificationReport& report) {
  const std::size_t n = g.order();
  for (const auto& state : states) {
    const std::uint64_t hash = state_hash(state);
    const ZExpectation e = expected_z_increment(state, g, p);
    const bool level = fightable_pairs_level(state, g, p.ell);
    const long double margin = e.margin();
    bool ok = margin >= -1e-12L;
    std::string note;
    if (level && std::fabs(margin) > 1e-12L) {
      ok = false;
      note = "equality expected";
    } else if (!level && !(margin > 0.0L)) {
      ok = false;
      note = "strict inequality expected";
    }
    report.rows.push_back({"submartingale", hash, static_cast<double>(e.expected_increment),
                           static_cast<double>(e.lower_bound), static_cast<double>(margin), ok, note});

    // Pathwise integer identity and conservation on every fight branch.
    const StepDistribution dist = enumerate_competing_step(state, g, p);
    const std::int64_t z0 = z_statistic(state);
    const std::int64_t total0 = std::accumulate(state.h.begin(), state.h.end(), std::int64_t{0});
    std::size_t mismatches = 0;
    std::int64_t worst = 0;
    for (const auto& b : dist.branches) {
      if (!b.fight) {
        if (b.next.h != state.h) ++mismatches;
        continue;
      }
      const std::size_t winner = b.attacker_won ? b.attacker : b.defender;
      const std::size_t loser = b.attacker_won ? b.defender : b.attacker;
      const std::int64_t actual = z_statistic(b.next) - z0;
      const std::int64_t closed = z_increment(n, 1, state.h[winner], state.h[loser]);
      const std::int64_t total = std::accumulate(b.next.h.begin(), b.next.h.end(), std::int64_t{0});
      if (actual != closed || total != total0) {
        ++mismatches;
        worst = std::max(worst, std::abs(actual - closed));
      }
    }
    report.rows.push_back({"pathwise-identity", hash, static_cast<double>(mismatches), 0.0,
                           static_cast<double>(-worst), mismatches == 0,
                           mismatches == 0 ? "" : std::to_string(mismatches) + " branch(es) violate dZ closed form"});
  }
}

void verify_jacobian(const SiteGraph& g, const BonabeauParams& p, double eps, double tol, VerificationReport& report) {
  const std::vector<double> zero(g.order(), 0.0);
  const DenseMatrix fd = finite_difference_jacobian(
      [&](std::span<const double> x) { return meanfield_agent_map(x, g, p); }, zero, eps);
  const DenseMatrix analytic = build_jacobian(g, p);
  double max_diff = 0.0;
  double max_asym = 0.0;
  double max_off = 0.0;
  for (std::size_t i = 0; i < g.order(); ++i) {
    for (std::size_t j = 0; j < g.order(); ++j) {
      max_diff = std::max(max_diff, std::abs(fd(i, j) - analytic(i, j)));
      max_asym = std::max(max_asym, std::abs(fd(i, j) - fd(j, i)));
      if (i != j && !g.adjacent(i, j)) max_off = std::max(max_off, std::abs(fd(i, j)));
    }
  }
  report.rows.push_back({"jacobian-fd", 0, max_diff, tol, tol - max_diff, max_diff <= tol, g.label()});
  report.rows.push_back({"jacobian-symmetry", 0, max_asym, tol, tol - max_asym, max_asym <= tol, g.label()});
  report.rows.push_back({"jacobian-sparsity", 0, max_off, 1e-8, 1e-8 - max_off, max_off < 1e-8, g.label()});
}

void verify_engine_agreement(std::span<const CompetingState> states, const SiteGraph& g, const CompetingParams& p,
                             std::size_t samples, Rng& rng, VerificationReport& report) {
  const double bound = 5.0 / std::sqrt(static_cast<double>(samples));
  for (const auto& state : states) {
    const double tv = empirical_vs_exact(state, g, p, samples, rng);
    report.rows.push_back({"engine-vs-oracle", state_hash(state), tv, bound, bound - tv, tv < bound, ""});
  }
}

}  // namespace bonabeau
