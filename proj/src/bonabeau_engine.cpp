#include "bonabeau/bonabeau_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bonabeau/csv.hpp"

namespace bonabeau {

double fight_probability(double hi, double hj, double eta) noexcept {
  const double x = eta * (hi - hj);
  const double e = std::exp(-std::abs(x));
  return x >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

double mean(std::span<const double> h) noexcept {
  if (h.empty()) return 0.0;
  return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
}

double sigma(std::span<const double> h) noexcept {
  if (h.empty()) return 0.0;
  const double m = mean(h);
  double ss = 0.0;
  for (double x : h) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(h.size()));
}

PowerState perturbed_zero_state(std::size_t n, double eps, Rng& rng) {
  PowerState s = PowerState::zeros(n);
  if (eps > 0.0) {
    for (double& x : s.h) x = eps * (2.0 * rng.uniform() - 1.0);
  }
  return s;
}

std::string fight_log_csv_header() { return "t,attacker,defender,winner"; }

std::string to_csv_row(const FightEvent& e) {
  return csv_join({std::to_string(e.t), std::to_string(e.attacker), std::to_string(e.defender),
                   std::to_string(e.winner())});
}

namespace {

void relax(std::vector<double>& h, double factor) {
  for (double& x : h) x *= factor;
}

}  // namespace

FullyOccupiedStepper::FullyOccupiedStepper(const SiteGraph& graph, BonabeauParams params, StepHooks hooks)
    : graph_(&graph), params_(BonabeauParams::make(params.eta, params.F, params.mu)), hooks_(hooks) {
  if (graph.edge_count() == 0) throw GraphError("fully occupied dynamics needs at least one edge");
}

std::optional<FightEvent> FullyOccupiedStepper::step(PowerState& state, Rng& rng) const {
  std::optional<FightEvent> event;
  if (hooks_.fights_enabled) {
    const Edge& e = graph_->edges()[rng.index(graph_->edge_count())];
    const bool u_attacks = rng.coin();
    FightEvent f{state.t, u_attacks ? e.u : e.v, u_attacks ? e.v : e.u, false};
    f.attacker_won = rng.bernoulli(fight_probability(state.h[f.attacker], state.h[f.defender], params_.eta));
    state.h[f.winner()] += 1.0;
    state.h[f.loser()] -= params_.F;
    event = f;
  }
  relax(state.h, 1.0 - params_.mu);
  ++state.t;
  return event;
}

std::pair<PowerState, FightEvent> step_fully_occupied(PowerState state, const SiteGraph& g,
                                                      const BonabeauParams& p, Rng& rng) {
  FullyOccupiedStepper stepper(g, p);
  auto event = stepper.step(state, rng);
  return {std::move(state), *event};
}

LatticeWorld LatticeWorld::place(const SiteGraph& lattice, double rho, Rng& rng) {
  if (!(rho > 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in (0,1]");
  const std::size_t sites = lattice.order();
  const auto agents = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rho * static_cast<double>(sites))));

  LatticeWorld w;
  w.lattice_ = &lattice;
  w.rho_ = rho;
  // Partial Fisher-Yates: the first `agents` entries are a uniform sample of sites.
  std::vector<std::size_t> order(sites);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < agents; ++i) {
    std::swap(order[i], order[i + rng.index(sites - i)]);
  }
  w.position_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(agents));
  w.occupant_.assign(sites, kVacant);
  for (std::size_t a = 0; a < agents; ++a) w.occupant_[w.position_[a]] = a;
  return w;
}

void LatticeWorld::move(std::size_t agent, std::size_t site) {
  occupant_[position_[agent]] = kVacant;
  position_[agent] = site;
  occupant_[site] = agent;
}

void LatticeWorld::swap_agents(std::size_t a, std::size_t b) {
  std::swap(position_[a], position_[b]);
  occupant_[position_[a]] = a;
  occupant_[position_[b]] = b;
}

bool LatticeWorld::consistent() const {
  std::size_t occupied = 0;
  for (std::size_t site = 0; site < occupant_.size(); ++site) {
    if (occupant_[site] == kVacant) continue;
    ++occupied;
    if (occupant_[site] >= position_.size() || position_[occupant_[site]] != site) return false;
  }
  return occupied == position_.size();
}

LatticeStepper::LatticeStepper(LatticeWorld world, BonabeauParams params, LatticeOptions options)
    : world_(std::move(world)), params_(BonabeauParams::make(params.eta, params.F, params.mu)), options_(options) {}

std::optional<FightEvent> LatticeStepper::step(PowerState& state, Rng& rng) {
  std::optional<FightEvent> event;
  const std::size_t agent = rng.index(world_.agent_count());
  const std::size_t site = world_.position(agent);
  const auto neighbors = world_.lattice().neighbors(site);
  bool relax_now = true;
  if (!neighbors.empty()) {
    const std::size_t target = neighbors[rng.index(neighbors.size())];
    const std::size_t defender = world_.occupant(target);
    if (defender == LatticeWorld::kVacant) {
      world_.move(agent, target);
      relax_now = options_.relax_on_move;
    } else {
      FightEvent f{state.t, agent, defender, false};
      f.attacker_won = rng.bernoulli(fight_probability(state.h[agent], state.h[defender], params_.eta));
      if (f.attacker_won) world_.swap_agents(agent, defender);
      state.h[f.winner()] += 1.0;
      state.h[f.loser()] -= params_.F;
      event = f;
    }
  }
  if (relax_now) relax(state.h, 1.0 - params_.mu);
  ++state.t;
  return event;
}

std::string trajectory_csv_header() { return "t,sigma,mean_power,fight_rate"; }

std::string to_csv_row(const TrajectorySample& s) {
  return csv_join({std::to_string(s.t), fmt17(s.sigma), fmt17(s.mean_power), fmt17(s.fight_rate)});
}

}  // namespace bonabeau
