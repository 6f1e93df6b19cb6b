#pragma once

// Experiment configuration: a JSON document of flat dotted keys, e.g.
//
//   {
//     "model": "bonabeau_full",
//     "graph.family": "star", "graph.n": 100,
//     "params.eta": 1, "params.F": 1, "params.mu": 0.2,
//     "run.steps": 1000000, "run.seed": 42,
//     "sweep.F": [1, 1.5, 3], "sweep.mu": [0.05, 0.1, 0.15]
//   }
//
// Nested objects are accepted and flattened ({"graph": {"n": 5}} is
// "graph.n"). Unknown keys are rejected. README.md lists every key.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bonabeau/competing.hpp"
#include "bonabeau/graph.hpp"
#include "bonabeau/params.hpp"
#include "json.hpp"

namespace bonabeau::experiments {

/// Validation failure; key() names the offending config key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class Model { bonabeau_full, bonabeau_lattice, competing };
std::string_view to_string(Model m);

struct GraphSpec {
  std::optional<GraphFamily> family;
  std::size_t n = 0;
  Boundary boundary = Boundary::periodic;
  std::string edge_list;  // path; used when family is empty

  SiteGraph build() const;
};

struct SweepAxis {
  std::string name;  // graph.n, F, eta, mu, ell, rho
  std::vector<double> values;
};

struct ExperimentConfig {
  Model model = Model::bonabeau_full;
  GraphSpec graph;

  double eta = 1.0;
  double F = 1.0;
  double mu = 0.5;
  std::int64_t ell = 1;
  std::vector<std::pair<std::uint64_t, double>> eta_schedule;  // competing; empty = constant eta
  EdgeSelection selection = EdgeSelection::all_edges;

  double rho = 1.0;
  bool relax_on_move = true;
  double init_perturbation = 0.0;

  std::uint64_t steps = 1'000'000;
  std::uint64_t warmup = 0;
  std::uint64_t measure_window = 0;
  std::uint64_t replicates = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t step_cap = kDefaultStepCap;
  std::uint64_t sample_stride = 0;

  std::vector<SweepAxis> sweep;  // canonical axis order, last varies fastest

  std::size_t verify_states = 200;
  std::size_t verify_samples = 20'000;
  double verify_fd_eps = 1e-6;
  std::int64_t verify_loser_loss = 1;  // negative-control hook

  std::uint64_t meanfield_iterations = 200;

  BonabeauParams bonabeau_params() const { return BonabeauParams::make(eta, F, mu); }
  CompetingParams competing_params() const;

  /// Canonical JSON echo (all keys, defaults applied) for run metadata.
  nlohmann::json to_json() const;
};

ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// One point of the sweep grid with the axis values applied.
struct SweepCell {
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> axis_values;
  ExperimentConfig config;
};

std::vector<SweepCell> expand_cells(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical config dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace bonabeau::experiments
