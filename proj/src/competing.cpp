#include "bonabeau/competing.hpp"

#include <algorithm>
#include <cmath>

#include "bonabeau/csv.hpp"
#include "bonabeau/params.hpp"

namespace bonabeau {

EtaSchedule EtaSchedule::constant(double eta) {
  require_eta(eta);
  EtaSchedule s;
  s.table_ = {{0, eta}};
  return s;
}

EtaSchedule EtaSchedule::piecewise(std::vector<std::pair<std::uint64_t, double>> table) {
  if (table.empty() || table.front().first != 0) {
    throw ParameterError("eta_schedule must start at t = 0");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    require_eta(table[i].second);
    if (i > 0 && table[i].first <= table[i - 1].first) {
      throw ParameterError("eta_schedule start times must be strictly increasing");
    }
  }
  EtaSchedule s;
  s.table_ = std::move(table);
  return s;
}

double EtaSchedule::at(std::uint64_t t) const {
  auto it = std::upper_bound(table_.begin(), table_.end(), t,
                             [](std::uint64_t value, const auto& entry) { return value < entry.first; });
  return std::prev(it)->second;
}

void CompetingParams::validate() const {
  if (ell < 1) throw ParameterError("ell must be a positive integer");
  if (loser_loss < 1) throw ParameterError("loser_loss must be >= 1");
}

double sigma(const CompetingState& s) {
  std::vector<double> h(s.h.begin(), s.h.end());
  return sigma(h);
}

namespace {

bool fightable(const CompetingState& s, const Edge& e, std::int64_t ell) {
  return !s.absorbed(e.u, ell) && !s.absorbed(e.v, ell);
}

}  // namespace

std::optional<FightEvent> step_competing(CompetingState& state, const SiteGraph& g, const CompetingParams& p,
                                         Rng& rng) {
  if (g.edge_count() == 0) throw GraphError("competing dynamics needs at least one edge");
  const Edge* chosen = nullptr;
  if (p.selection == EdgeSelection::all_edges) {
    chosen = &g.edges()[rng.index(g.edge_count())];
    if (!fightable(state, *chosen, p.ell)) chosen = nullptr;
  } else {
    std::vector<const Edge*> live;
    for (const Edge& e : g.edges()) {
      if (fightable(state, e, p.ell)) live.push_back(&e);
    }
    if (!live.empty()) chosen = live[rng.index(live.size())];
  }

  std::optional<FightEvent> event;
  if (chosen != nullptr) {
    const bool u_attacks = rng.coin();
    FightEvent f{state.t, u_attacks ? chosen->u : chosen->v, u_attacks ? chosen->v : chosen->u, false};
    const double q = fight_probability(static_cast<double>(state.h[f.attacker]),
                                       static_cast<double>(state.h[f.defender]), p.eta.at(state.t));
    f.attacker_won = rng.bernoulli(q);
    state.h[f.winner()] += 1;
    state.h[f.loser()] -= p.loser_loss;
    event = f;
  }
  ++state.t;
  return event;
}

bool is_terminal(const CompetingState& state, const SiteGraph& g, std::int64_t ell) {
  return std::none_of(g.edges().begin(), g.edges().end(),
                      [&](const Edge& e) { return fightable(state, e, ell); });
}

std::int64_t z_statistic(const CompetingState& state) {
  // sum_{i,j} (h_i - h_j)^2 = 2 n sum h_i^2 - 2 (sum h_i)^2
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  for (std::int64_t x : state.h) {
    sum += x;
    sum_sq += x * x;
  }
  const auto n = static_cast<std::int64_t>(state.h.size());
  return 2 * n * sum_sq - 2 * sum * sum;
}

TerminationResult run_to_termination(const SiteGraph& g, const CompetingParams& p, Rng& rng,
                                     std::uint64_t step_cap, bool record_z) {
  p.validate();
  if (g.edge_count() == 0) throw GraphError("competing dynamics needs at least one edge");
  TerminationResult r;
  r.final_state = CompetingState::zeros(g.order());
  CompetingState& s = r.final_state;

  // Number of edges with both endpoints active; only decreases.
  std::size_t live_edges = 0;
  for (const Edge& e : g.edges()) live_edges += fightable(s, e, p.ell) ? 1 : 0;

  std::int64_t z = z_statistic(s);
  while (live_edges > 0 && r.steps < step_cap) {
    auto event = step_competing(s, g, p, rng);
    ++r.steps;
    if (!event) continue;
    ++r.fights;
    const std::size_t w = event->winner();
    const std::size_t l = event->loser();
    z += z_increment(g.order(), 1, s.h[w] - 1, s.h[l] + p.loser_loss);
    if (record_z) r.z_trace.push_back(z);
    if (s.absorbed(l, p.ell)) {
      for (std::size_t nb : g.neighbors(l)) {
        if (!s.absorbed(nb, p.ell)) --live_edges;
      }
    }
  }
  r.terminal = live_edges == 0;
  r.final_z = z_statistic(s);
  return r;
}

std::string termination_csv_header() {
  return "graph_id,n,ell,seed,terminal,steps,fights,final_Z,final_sigma";
}

std::string termination_csv_row(const std::string& graph_id, std::size_t n, std::int64_t ell, std::uint64_t seed,
                                const TerminationResult& r) {
  return csv_join({graph_id, std::to_string(n), std::to_string(ell), std::to_string(seed),
                   r.terminal ? "true" : "false", std::to_string(r.steps), std::to_string(r.fights),
                   std::to_string(r.final_z), fmt17(sigma(r.final_state))});
}

}  // namespace bonabeau
