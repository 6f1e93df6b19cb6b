#include "bonabeau/experiments/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bonabeau::experiments {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::bonabeau_full: return "bonabeau_full";
    case Model::bonabeau_lattice: return "bonabeau_lattice";
    case Model::competing: return "competing";
  }
  return "?";
}

SiteGraph GraphSpec::build() const {
  if (family) return build_family(*family, n, boundary);
  return load_edge_list(edge_list);
}

CompetingParams ExperimentConfig::competing_params() const {
  CompetingParams p;
  p.ell = ell;
  p.eta = eta_schedule.empty() ? EtaSchedule::constant(eta) : EtaSchedule::piecewise(eta_schedule);
  p.selection = selection;
  p.loser_loss = verify_loser_loss;
  return p;
}

namespace {

// Canonical sweep axis order; the last listed axis varies fastest.
constexpr std::array<std::string_view, 6> kAxisOrder{"graph.n", "F", "eta", "mu", "ell", "rho"};

void flatten(const nlohmann::json& node, const std::string& prefix, std::map<std::string, nlohmann::json>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else {
    out[prefix] = node;
  }
}

class Reader {
 public:
  explicit Reader(const nlohmann::json& document) {
    if (!document.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    flatten(document, "", values_);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const nlohmann::json& raw(const std::string& key) {
    used_.insert(key);
    return values_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    // Accept integral floats such as 1e6.
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(key, "expected a non-negative integer");
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) {
      return static_cast<std::int64_t>(v.get<double>());
    }
    throw ConfigError(key, "expected an integer");
  }

  std::string text(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<std::string> unused() const {
    std::vector<std::string> keys;
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) keys.push_back(key);
    }
    return keys;
  }

 private:
  std::map<std::string, nlohmann::json> values_;
  std::set<std::string> used_;
};

template <typename Check>
void guarded(const std::string& key, Check&& check) {
  try {
    check();
  } catch (const ParameterError& e) {
    throw ConfigError(key, e.what());
  } catch (const GraphError& e) {
    throw ConfigError(key, e.what());
  }
}

void validate_axis_value(const std::string& axis, double v) {
  const std::string key = "sweep." + axis;
  guarded(key, [&] {
    if (axis == "mu") require_mu(v);
    else if (axis == "eta") require_eta(v);
    else if (axis == "F") require_loss(v);
    else if (axis == "rho") {
      if (!(v > 0.0 && v <= 1.0)) throw ParameterError("rho must lie in (0,1]");
    } else if (axis == "ell") {
      if (v < 1.0 || v != std::floor(v)) throw ParameterError("ell must be a positive integer");
    } else if (axis == "graph.n") {
      if (v < 1.0 || v != std::floor(v)) throw ParameterError("graph.n must be a positive integer");
    }
  });
}

void validate(ExperimentConfig& cfg) {
  guarded("params.eta", [&] { require_eta(cfg.eta); });
  guarded("params.F", [&] { require_loss(cfg.F); });
  guarded("params.mu", [&] { require_mu(cfg.mu); });
  if (cfg.ell < 1) throw ConfigError("params.ell", "ell must be a positive integer");
  if (!cfg.eta_schedule.empty()) {
    guarded("params.eta_schedule", [&] { (void)EtaSchedule::piecewise(cfg.eta_schedule); });
  }
  if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) throw ConfigError("lattice.rho", "rho must lie in (0,1]");
  if (cfg.init_perturbation < 0.0) throw ConfigError("init.perturbation", "must be >= 0");
  if (cfg.replicates < 1) throw ConfigError("run.replicates", "replicates must be >= 1");
  if (cfg.step_cap < 1) throw ConfigError("run.step_cap", "step_cap must be >= 1");
  if (cfg.warmup + cfg.measure_window > cfg.steps) {
    throw ConfigError("run.warmup", "warmup + measure_window must not exceed steps");
  }
  if (!(cfg.verify_fd_eps >= 1e-8 && cfg.verify_fd_eps <= 1e-4)) {
    throw ConfigError("verify.fd_eps", "must lie in [1e-8, 1e-4]");
  }
  if (cfg.verify_samples < 1) throw ConfigError("verify.samples", "must be >= 1");
  if (cfg.verify_loser_loss < 1) throw ConfigError("verify.loser_loss", "must be >= 1");
  if (cfg.graph.family) {
    guarded("graph.n", [&] { (void)build_family(*cfg.graph.family, cfg.graph.n, cfg.graph.boundary); });
  }
  if (cfg.model == Model::bonabeau_lattice && cfg.graph.family != GraphFamily::lattice2d) {
    throw ConfigError("graph.family", "bonabeau_lattice requires graph.family = lattice2d");
  }
  for (const auto& axis : cfg.sweep) {
    for (double v : axis.values) validate_axis_value(axis.name, v);
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& document) {
  Reader in(document);
  ExperimentConfig cfg;

  if (!in.has("model")) throw ConfigError("model", "missing model");
  const std::string model = in.text("model", "");
  if (model == "bonabeau_full") cfg.model = Model::bonabeau_full;
  else if (model == "bonabeau_lattice") cfg.model = Model::bonabeau_lattice;
  else if (model == "competing") cfg.model = Model::competing;
  else throw ConfigError("model", "unknown model '" + model + "'");

  const bool has_family = in.has("graph.family");
  const bool has_edges = in.has("graph.edge_list");
  if (!has_family && !has_edges) throw ConfigError("graph", "missing graph spec (graph.family or graph.edge_list)");
  if (has_family && has_edges) throw ConfigError("graph", "give either graph.family or graph.edge_list, not both");
  if (has_family) {
    const std::string family = in.text("graph.family", "");
    guarded("graph.family", [&] { cfg.graph.family = parse_family(family); });
    if (!in.has("graph.n")) throw ConfigError("graph.n", "missing vertex count");
    cfg.graph.n = in.count("graph.n", 0);
    const std::string boundary = in.text("graph.boundary", "periodic");
    guarded("graph.boundary", [&] { cfg.graph.boundary = parse_boundary(boundary); });
  } else {
    cfg.graph.edge_list = in.text("graph.edge_list", "");
  }

  cfg.eta = in.number("params.eta", cfg.eta);
  cfg.F = in.number("params.F", cfg.F);
  cfg.mu = in.number("params.mu", cfg.mu);
  cfg.ell = in.integer("params.ell", cfg.ell);
  if (in.has("params.eta_schedule")) {
    const auto& table = in.raw("params.eta_schedule");
    if (!table.is_array()) throw ConfigError("params.eta_schedule", "expected [[t_start, eta], ...]");
    for (const auto& entry : table) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_unsigned() || !entry[1].is_number()) {
        throw ConfigError("params.eta_schedule", "entries must be [t_start, eta] pairs");
      }
      cfg.eta_schedule.emplace_back(entry[0].get<std::uint64_t>(), entry[1].get<double>());
    }
  }
  const std::string selection = in.text("competing.selection", "all_edges");
  if (selection == "all_edges") cfg.selection = EdgeSelection::all_edges;
  else if (selection == "fightable_edges") cfg.selection = EdgeSelection::fightable_edges;
  else throw ConfigError("competing.selection", "expected all_edges or fightable_edges");

  cfg.rho = in.number("lattice.rho", cfg.rho);
  cfg.relax_on_move = in.flag("lattice.relax_on_move", cfg.relax_on_move);
  cfg.init_perturbation = in.number("init.perturbation", cfg.init_perturbation);

  cfg.steps = in.count("run.steps", cfg.steps);
  cfg.measure_window = in.count("run.measure_window", cfg.steps / 5);
  if (in.has("run.warmup")) {
    cfg.warmup = in.count("run.warmup", 0);
  } else {
    cfg.warmup = cfg.measure_window <= cfg.steps ? cfg.steps - cfg.measure_window : 0;
  }
  cfg.replicates = in.count("run.replicates", cfg.replicates);
  cfg.master_seed = in.count("run.seed", cfg.master_seed);
  cfg.step_cap = in.count("run.step_cap", cfg.step_cap);
  cfg.sample_stride = in.count("run.sample_stride", cfg.sample_stride);

  for (std::string_view axis : kAxisOrder) {
    const std::string key = "sweep." + std::string(axis);
    if (!in.has(key)) continue;
    const auto& values = in.raw(key);
    if (!values.is_array() || values.empty()) throw ConfigError(key, "sweep grid must be a non-empty array");
    SweepAxis a{std::string(axis), {}};
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError(key, "sweep values must be numbers");
      a.values.push_back(v.get<double>());
    }
    cfg.sweep.push_back(std::move(a));
  }

  cfg.verify_states = in.count("verify.states", cfg.verify_states);
  cfg.verify_samples = in.count("verify.samples", cfg.verify_samples);
  cfg.verify_fd_eps = in.number("verify.fd_eps", cfg.verify_fd_eps);
  cfg.verify_loser_loss = in.integer("verify.loser_loss", cfg.verify_loser_loss);
  cfg.meanfield_iterations = in.count("meanfield.iterations", cfg.meanfield_iterations);

  if (auto extra = in.unused(); !extra.empty()) throw ConfigError(extra.front(), "unknown key");
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  j["model"] = std::string(to_string(model));
  if (graph.family) {
    j["graph.family"] = std::string(bonabeau::to_string(*graph.family));
    j["graph.n"] = graph.n;
    j["graph.boundary"] = std::string(bonabeau::to_string(graph.boundary));
  } else {
    j["graph.edge_list"] = graph.edge_list;
  }
  j["params.eta"] = eta;
  j["params.F"] = F;
  j["params.mu"] = mu;
  j["params.ell"] = ell;
  if (!eta_schedule.empty()) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [t, e] : eta_schedule) table.push_back({t, e});
    j["params.eta_schedule"] = table;
  }
  j["competing.selection"] = selection == EdgeSelection::all_edges ? "all_edges" : "fightable_edges";
  j["lattice.rho"] = rho;
  j["lattice.relax_on_move"] = relax_on_move;
  j["init.perturbation"] = init_perturbation;
  j["run.steps"] = steps;
  j["run.warmup"] = warmup;
  j["run.measure_window"] = measure_window;
  j["run.replicates"] = replicates;
  j["run.seed"] = master_seed;
  j["run.step_cap"] = step_cap;
  j["run.sample_stride"] = sample_stride;
  for (const auto& axis : sweep) j["sweep." + axis.name] = axis.values;
  j["verify.states"] = verify_states;
  j["verify.samples"] = verify_samples;
  j["verify.fd_eps"] = verify_fd_eps;
  j["verify.loser_loss"] = verify_loser_loss;
  j["meanfield.iterations"] = meanfield_iterations;
  return j;
}

std::vector<SweepCell> expand_cells(const ExperimentConfig& cfg) {
  std::vector<SweepCell> cells;
  std::vector<std::size_t> digit(cfg.sweep.size(), 0);
  while (true) {
    SweepCell cell;
    cell.index = cells.size();
    cell.config = cfg;
    cell.config.sweep.clear();
    for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
      const std::string& name = cfg.sweep[a].name;
      const double v = cfg.sweep[a].values[digit[a]];
      cell.axis_values.emplace_back(name, v);
      ExperimentConfig& c = cell.config;
      if (name == "graph.n") c.graph.n = static_cast<std::size_t>(v);
      else if (name == "F") c.F = v;
      else if (name == "eta") c.eta = v;
      else if (name == "mu") c.mu = v;
      else if (name == "ell") c.ell = static_cast<std::int64_t>(v);
      else if (name == "rho") c.rho = v;
    }
    cells.push_back(std::move(cell));

    // Odometer increment, last axis fastest.
    std::size_t a = cfg.sweep.size();
    while (a > 0) {
      --a;
      if (++digit[a] < cfg.sweep[a].values.size()) break;
      digit[a] = 0;
      if (a == 0) return cells;
    }
    if (cfg.sweep.empty()) return cells;
  }
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = cfg.to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bonabeau::experiments
