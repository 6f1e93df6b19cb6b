#pragma once

// Stochastic Bonabeau dynamics: one selection event per time step, a Fermi
// fight between the selected pair, winner +1, loser -F, then every agent's
// power is multiplied by (1 - mu).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bonabeau/graph.hpp"
#include "bonabeau/params.hpp"
#include "bonabeau/rng.hpp"

namespace bonabeau {

/// Probability that an agent with power hi beats one with power hj.
/// Evaluated through exp(-|x|) so the result is monotone and never NaN.
double fight_probability(double hi, double hj, double eta) noexcept;

struct PowerState {
  std::vector<double> h;
  std::uint64_t t = 0;

  static PowerState zeros(std::size_t n) { return {std::vector<double>(n, 0.0), 0}; }
  std::size_t size() const noexcept { return h.size(); }
};

/// Population standard deviation.
double sigma(std::span<const double> h) noexcept;
inline double sigma(const PowerState& s) noexcept { return sigma(s.h); }
double mean(std::span<const double> h) noexcept;

/// Initial state with i.i.d. uniform(-eps, eps) perturbations of zero.
PowerState perturbed_zero_state(std::size_t n, double eps, Rng& rng);

struct FightEvent {
  std::uint64_t t = 0;
  std::size_t attacker = 0;
  std::size_t defender = 0;
  bool attacker_won = false;

  std::size_t winner() const noexcept { return attacker_won ? attacker : defender; }
  std::size_t loser() const noexcept { return attacker_won ? defender : attacker; }
};

std::string fight_log_csv_header();
std::string to_csv_row(const FightEvent& e);

/// Test hooks; defaults reproduce the model.
struct StepHooks {
  bool fights_enabled = true;
};

/// Fully occupied site graph: agent i lives on vertex i. Each step picks an
/// edge uniformly and assigns attacker/defender by a fair coin.
class FullyOccupiedStepper {
 public:
  FullyOccupiedStepper(const SiteGraph& graph, BonabeauParams params, StepHooks hooks = {});

  std::optional<FightEvent> step(PowerState& state, Rng& rng) const;

  const SiteGraph& graph() const noexcept { return *graph_; }
  const BonabeauParams& params() const noexcept { return params_; }

 private:
  const SiteGraph* graph_;
  BonabeauParams params_;
  StepHooks hooks_;
};

/// Value-returning convenience wrapper over FullyOccupiedStepper.
std::pair<PowerState, FightEvent> step_fully_occupied(PowerState state, const SiteGraph& g,
                                                      const BonabeauParams& p, Rng& rng);

/// Agents placed on a lattice with at most one agent per site.
class LatticeWorld {
 public:
  static constexpr std::size_t kVacant = static_cast<std::size_t>(-1);

  /// round(rho * sites) agents (at least one) on uniformly chosen sites.
  static LatticeWorld place(const SiteGraph& lattice, double rho, Rng& rng);

  const SiteGraph& lattice() const noexcept { return *lattice_; }
  double rho() const noexcept { return rho_; }
  std::size_t agent_count() const noexcept { return position_.size(); }

  std::size_t position(std::size_t agent) const { return position_[agent]; }
  /// Agent id at site, or kVacant.
  std::size_t occupant(std::size_t site) const { return occupant_[site]; }

  void move(std::size_t agent, std::size_t site);
  void swap_agents(std::size_t a, std::size_t b);

  /// True when occupant/position are mutually inverse and one agent per site.
  bool consistent() const;

 private:
  LatticeWorld() = default;

  const SiteGraph* lattice_ = nullptr;
  double rho_ = 1.0;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> occupant_;
};

struct LatticeOptions {
  bool relax_on_move = true;
};

/// Partially occupied lattice: a uniformly chosen agent targets a uniformly
/// chosen neighboring site; it moves if vacant and fights the occupant
/// otherwise, taking the site on a win.
class LatticeStepper {
 public:
  LatticeStepper(LatticeWorld world, BonabeauParams params, LatticeOptions options = {});

  std::optional<FightEvent> step(PowerState& state, Rng& rng);

  const LatticeWorld& world() const noexcept { return world_; }
  const BonabeauParams& params() const noexcept { return params_; }

 private:
  LatticeWorld world_;
  BonabeauParams params_;
  LatticeOptions options_;
};

struct TrajectorySample {
  std::uint64_t t = 0;
  double sigma = 0.0;
  double mean_power = 0.0;
  double fight_rate = 0.0;  // fights per step since the previous sample
};

std::string trajectory_csv_header();
std::string to_csv_row(const TrajectorySample& s);

struct RunOptions {
  std::uint64_t steps = 0;
  /// Record a sample every `sample_stride` steps (and at t = 0); 0 disables.
  std::uint64_t sample_stride = 0;
  /// sigma is time-averaged over the states after steps warmup+1 .. warmup+measure_window.
  std::uint64_t warmup = 0;
  std::uint64_t measure_window = 0;
  /// Optional fight log sink.
  std::vector<FightEvent>* fight_log = nullptr;
};

struct TrajectoryStats {
  PowerState final_state;
  std::vector<TrajectorySample> samples;
  double time_averaged_sigma = 0.0;
  std::uint64_t averaged_states = 0;
  std::uint64_t fights = 0;
  double fight_rate = 0.0;
};

/// Applies `stepper` options.steps times starting from `initial`. With an
/// empty measure window the time average is the sigma of the final state.
template <typename Stepper>
TrajectoryStats run(PowerState initial, Stepper& stepper, const RunOptions& options, Rng& rng) {
  TrajectoryStats stats;
  stats.final_state = std::move(initial);
  PowerState& state = stats.final_state;
  if (options.sample_stride > 0) {
    stats.samples.push_back({state.t, sigma(state), mean(state.h), 0.0});
  }
  const std::uint64_t window_begin = options.warmup;
  const std::uint64_t window_end = options.warmup + options.measure_window;
  double sigma_sum = 0.0;
  std::uint64_t fights_since_sample = 0;
  for (std::uint64_t k = 1; k <= options.steps; ++k) {
    if (auto event = stepper.step(state, rng)) {
      ++stats.fights;
      ++fights_since_sample;
      if (options.fight_log) options.fight_log->push_back(*event);
    }
    if (k > window_begin && k <= window_end) {
      sigma_sum += sigma(state);
      ++stats.averaged_states;
    }
    if (options.sample_stride > 0 && k % options.sample_stride == 0) {
      stats.samples.push_back({state.t, sigma(state), mean(state.h),
                               static_cast<double>(fights_since_sample) / static_cast<double>(options.sample_stride)});
      fights_since_sample = 0;
    }
  }
  stats.time_averaged_sigma =
      stats.averaged_states > 0 ? sigma_sum / static_cast<double>(stats.averaged_states) : sigma(state);
  stats.fight_rate = options.steps > 0 ? static_cast<double>(stats.fights) / static_cast<double>(options.steps) : 0.0;
  return stats;
}

}  // namespace bonabeau
