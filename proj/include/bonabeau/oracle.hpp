#pragma once

// Exact small-instance oracles: one-step enumeration of the competing model,
// the exact expected change of Z, central-difference Jacobians, and
// engine-versus-enumeration agreement.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bonabeau/competing.hpp"
#include "bonabeau/graph.hpp"
#include "bonabeau/matrix.hpp"
#include "bonabeau/params.hpp"
#include "bonabeau/rng.hpp"

namespace bonabeau {

class OracleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxEnumerationAgents = 12;

/// One (edge, role, outcome) branch of a step. No-op branches have
/// fight == false and carry the unchanged state.
struct StepBranch {
  bool fight = false;
  std::size_t attacker = 0;
  std::size_t defender = 0;
  bool attacker_won = false;
  long double probability = 0.0L;
  CompetingState next;
};

struct StepOutcome {
  std::vector<std::int64_t> next;
  long double probability = 0.0L;
};

struct StepDistribution {
  std::vector<StepBranch> branches;   // raw branches, possibly repeating states
  std::vector<StepOutcome> outcomes;  // distinct next states, sorted
  long double fight_probability = 0.0L;

  long double total_probability() const;
};

/// Every branch of step_competing from `state`, with its exact probability.
/// Throws OracleError above kMaxEnumerationAgents agents.
StepDistribution enumerate_competing_step(const CompetingState& state, const SiteGraph& g, const CompetingParams& p);

struct ZExpectation {
  long double expected_increment = 0.0L;  // E[Z_{t+1} - Z_t]
  long double lower_bound = 0.0L;         // 4 n P(fight)
  long double margin() const { return expected_increment - lower_bound; }
};

ZExpectation expected_z_increment(const CompetingState& state, const SiteGraph& g, const CompetingParams& p);

/// True when every edge with two active endpoints joins equal powers (the
/// equality case of the submartingale bound). Vacuously true when terminal.
bool fightable_pairs_level(const CompetingState& state, const SiteGraph& g, std::int64_t ell);

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

/// J_ij ~ (f_i(x + eps e_j) - f_i(x - eps e_j)) / (2 eps). eps in [1e-8, 1e-4].
DenseMatrix finite_difference_jacobian(const VectorMap& map, std::span<const double> point, double eps);

/// Total-variation distance between the empirical distribution of `samples`
/// engine steps from `state` and the enumerated distribution.
double empirical_vs_exact(const CompetingState& state, const SiteGraph& g, const CompetingParams& p,
                          std::size_t samples, Rng& rng);

/// `count` states visited by the engine from the zero state, each a uniformly
/// chosen point of an independent run taken to termination.
std::vector<CompetingState> reachable_states(const SiteGraph& g, const CompetingParams& p, std::size_t count,
                                             Rng& rng);

std::uint64_t state_hash(const CompetingState& state);

/// One line of a verification report.
struct CheckRow {
  std::string suite;
  std::uint64_t state_hash = 0;
  double value = 0.0;  // E[dZ], max |dJ|, TV distance ...
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckRow> rows;
  bool passed() const;
  std::string to_text() const;
};

/// Submartingale bound, equality condition, and the pathwise integer identity
/// on every enumerated branch of each state.
void verify_submartingale(std::span<const CompetingState> states, const SiteGraph& g, const CompetingParams& p,
                          VerificationReport& report);

/// Central-difference Jacobian of the mean-field map at the zero state versus
/// the analytic Jacobian, entrywise within `tol`.
void verify_jacobian(const SiteGraph& g, const BonabeauParams& p, double eps, double tol, VerificationReport& report);

/// Engine sampling versus enumeration; TV must stay below 5/sqrt(samples).
void verify_engine_agreement(std::span<const CompetingState> states, const SiteGraph& g, const CompetingParams& p,
                             std::size_t samples, Rng& rng, VerificationReport& report);

}  // namespace bonabeau
