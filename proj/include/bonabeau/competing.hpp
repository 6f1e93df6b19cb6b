#pragma once

// Competing model: integer powers, F = 1, no relaxation, and an absorbing
// power -ell below which an agent never fights again. Powers start at zero
// so the total stays zero and every power lies in [-ell, (n-1) ell].

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bonabeau/bonabeau_engine.hpp"
#include "bonabeau/graph.hpp"
#include "bonabeau/rng.hpp"

namespace bonabeau {

/// Time-dependent Fermi steepness: constant, or a piecewise-constant table of
/// (t_start, eta) entries sorted by t_start with the first entry at t = 0.
class EtaSchedule {
 public:
  static EtaSchedule constant(double eta);
  static EtaSchedule piecewise(std::vector<std::pair<std::uint64_t, double>> table);

  double at(std::uint64_t t) const;
  const std::vector<std::pair<std::uint64_t, double>>& table() const noexcept { return table_; }

 private:
  std::vector<std::pair<std::uint64_t, double>> table_;
};

enum class EdgeSelection {
  all_edges,       // uniform over E; steps touching an absorbed agent are no-ops
  fightable_edges  // uniform over edges whose endpoints are both active
};

struct CompetingParams {
  std::int64_t ell = 1;
  EtaSchedule eta = EtaSchedule::constant(1.0);
  EdgeSelection selection = EdgeSelection::all_edges;
  /// Loser's decrement. Anything other than 1 breaks the model; exists only
  /// for negative-control checks.
  std::int64_t loser_loss = 1;

  void validate() const;
};

struct CompetingState {
  std::vector<std::int64_t> h;
  std::uint64_t t = 0;

  static CompetingState zeros(std::size_t n) { return {std::vector<std::int64_t>(n, 0), 0}; }
  std::size_t size() const noexcept { return h.size(); }
  bool absorbed(std::size_t i, std::int64_t ell) const noexcept { return h[i] <= -ell; }

  friend bool operator==(const CompetingState&, const CompetingState&) = default;
};

double sigma(const CompetingState& s);

/// One selection event. Returns the fight, or nullopt for a no-op step.
std::optional<FightEvent> step_competing(CompetingState& state, const SiteGraph& g, const CompetingParams& p,
                                         Rng& rng);

/// True iff no edge joins two non-absorbed agents.
bool is_terminal(const CompetingState& state, const SiteGraph& g, std::int64_t ell);

/// Sum over ordered pairs (i, j) of (h_i - h_j)^2.
std::int64_t z_statistic(const CompetingState& state);

/// Exact change of Z caused by a fight between p and q on n agents, where
/// p's power moves by delta_p = +-1 from h_p: 4n[delta_p (h_p - h_q) + 1].
constexpr std::int64_t z_increment(std::size_t n, std::int64_t delta_p, std::int64_t hp, std::int64_t hq) {
  return 4 * static_cast<std::int64_t>(n) * (delta_p * (hp - hq) + 1);
}

struct TerminationResult {
  CompetingState final_state;
  bool terminal = false;  // false means step_cap was hit first
  std::uint64_t steps = 0;
  std::uint64_t fights = 0;
  std::vector<std::int64_t> z_trace;  // Z after each fight, when recorded
  std::int64_t final_z = 0;
};

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

/// Steps from the all-zero state until is_terminal holds or step_cap steps
/// have been taken.
TerminationResult run_to_termination(const SiteGraph& g, const CompetingParams& p, Rng& rng,
                                     std::uint64_t step_cap = kDefaultStepCap, bool record_z = true);

std::string termination_csv_header();
std::string termination_csv_row(const std::string& graph_id, std::size_t n, std::int64_t ell, std::uint64_t seed,
                                const TerminationResult& r);

}  // namespace bonabeau
