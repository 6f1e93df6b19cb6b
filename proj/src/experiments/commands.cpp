#include "bonabeau/experiments/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <stdexcept>

#include "bonabeau/bonabeau_engine.hpp"
#include "bonabeau/csv.hpp"
#include "bonabeau/experiments/parallel.hpp"
#include "bonabeau/meanfield.hpp"
#include "bonabeau/spectral.hpp"

namespace bonabeau::experiments {

std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t cell, std::size_t replicate) {
  return derive_seed(cfg.master_seed, cell, replicate);
}

namespace {

SiteGraph build_cell_graph(const SweepCell& cell) {
  try {
    return cell.config.graph.build();
  } catch (const GraphError& e) {
    throw ConfigError("graph", e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------- stability

std::string cmd_stability(const ExperimentConfig& cfg) {
  if (cfg.model != Model::bonabeau_full) {
    throw ConfigError("model", "stability analysis applies to the bonabeau_full model");
  }
  std::string out = stability_csv_header() + ",coupling,large_n_threshold,critical_mu,limiting_critical_mu\n";
  for (const auto& cell : expand_cells(cfg)) {
    const SiteGraph g = build_cell_graph(cell);
    const BonabeauParams p = cell.config.bonabeau_params();
    const StabilityReport r = stability_report(g, p);
    out += to_csv_row(r);
    out += "," + fmt17(p.coupling()) + "," + fmt17(large_n_threshold(p.mu)) + "," + fmt17(r.critical_mu()) + "," +
           fmt17(limiting_critical_mu(p.coupling())) + "\n";
  }
  return out;
}

// -------------------------------------------------------------------- sweep

std::string sweep_csv_header() {
  return "cell,model,graph_id,n,eta,F,mu,rho,steps,warmup,measure_window,replicates,master_seed,"
         "mean_sigma,sd_sigma,fight_rate,predicted_classification";
}

std::string to_csv_row(const SweepRow& r) {
  return csv_join({std::to_string(r.cell), r.model, r.graph_id, std::to_string(r.n), fmt17(r.eta), fmt17(r.F),
                   fmt17(r.mu), fmt17(r.rho), std::to_string(r.steps), std::to_string(r.warmup),
                   std::to_string(r.measure_window), std::to_string(r.replicates), std::to_string(r.master_seed),
                   fmt17(r.mean_sigma), fmt17(r.sd_sigma), fmt17(r.fight_rate), r.predicted});
}

double SweepRow::value(std::string_view column) const {
  if (column == "cell") return static_cast<double>(cell);
  if (column == "n") return static_cast<double>(n);
  if (column == "eta") return eta;
  if (column == "F") return F;
  if (column == "mu") return mu;
  if (column == "rho") return rho;
  if (column == "mean_sigma") return mean_sigma;
  if (column == "sd_sigma") return sd_sigma;
  if (column == "fight_rate") return fight_rate;
  throw std::invalid_argument("unknown sweep column '" + std::string(column) + "'");
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  std::vector<SweepRow> rows;
  std::vector<std::string> header;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) throw std::invalid_argument("sweep CSV row has wrong field count");
    std::map<std::string, std::string> f;
    for (std::size_t i = 0; i < header.size(); ++i) f[header[i]] = fields[i];
    auto need = [&](const char* key) -> const std::string& {
      auto it = f.find(key);
      if (it == f.end()) throw std::invalid_argument(std::string("sweep CSV lacks column '") + key + "'");
      return it->second;
    };
    auto num = [&](const char* key) {
      const std::string& s = need(key);
      if (s == "nan" || s == "-nan") return std::nan("");
      return std::stod(s);
    };
    SweepRow r;
    r.cell = std::stoul(need("cell"));
    r.model = need("model");
    r.graph_id = need("graph_id");
    r.n = std::stoul(need("n"));
    r.eta = num("eta");
    r.F = num("F");
    r.mu = num("mu");
    r.rho = num("rho");
    r.steps = std::stoull(need("steps"));
    r.warmup = std::stoull(need("warmup"));
    r.measure_window = std::stoull(need("measure_window"));
    r.replicates = std::stoull(need("replicates"));
    r.master_seed = std::stoull(need("master_seed"));
    r.mean_sigma = num("mean_sigma");
    r.sd_sigma = num("sd_sigma");
    r.fight_rate = num("fight_rate");
    r.predicted = need("predicted_classification");
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

struct ReplicateOutcome {
  double time_averaged_sigma = 0.0;
  double final_sigma = 0.0;
  double fight_rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<TrajectorySample> samples;
};

ReplicateOutcome run_replicate(const SweepCell& cell, const SiteGraph& g, std::uint64_t seed) {
  const ExperimentConfig& c = cell.config;
  Rng rng(seed);
  RunOptions opts;
  opts.steps = c.steps;
  opts.warmup = c.warmup;
  opts.measure_window = c.measure_window;
  opts.sample_stride = c.sample_stride;
  TrajectoryStats stats;
  if (c.model == Model::bonabeau_full) {
    FullyOccupiedStepper stepper(g, c.bonabeau_params());
    stats = run(perturbed_zero_state(g.order(), c.init_perturbation, rng), stepper, opts, rng);
  } else {
    LatticeWorld world = LatticeWorld::place(g, c.rho, rng);
    const std::size_t agents = world.agent_count();
    LatticeStepper stepper(std::move(world), c.bonabeau_params(), LatticeOptions{c.relax_on_move});
    stats = run(perturbed_zero_state(agents, c.init_perturbation, rng), stepper, opts, rng);
  }
  return {stats.time_averaged_sigma, sigma(stats.final_state), stats.fight_rate, seed, std::move(stats.samples)};
}

}  // namespace

SweepResult cmd_sweep(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.model == Model::competing) {
    throw ConfigError("model", "sweep runs the Bonabeau models; use the competing command");
  }
  const auto cells = expand_cells(cfg);
  std::vector<std::unique_ptr<SiteGraph>> graphs;
  std::vector<std::string> predicted;
  for (const auto& cell : cells) {
    graphs.push_back(std::make_unique<SiteGraph>(build_cell_graph(cell)));
    const SiteGraph& g = *graphs.back();
    std::string label = "n/a";
    if (cell.config.model == Model::bonabeau_full) {
      if (g.edge_count() == 0) throw ConfigError("graph", "fully occupied dynamics needs at least one edge");
      if (is_connected(g)) label = std::string(to_string(stability_report(g, cell.config.bonabeau_params()).classification));
    }
    predicted.push_back(label);
  }

  const std::size_t reps = cfg.replicates;
  std::vector<ReplicateOutcome> outcomes(cells.size() * reps);
  parallel_for(outcomes.size(), threads, [&](std::size_t task) {
    const std::size_t c = task / reps;
    const std::size_t r = task % reps;
    outcomes[task] = run_replicate(cells[c], *graphs[c], replicate_seed(cfg, c, r));
  });

  SweepResult result;
  result.csv = sweep_csv_header() + "\n";
  result.raw_csv = "cell,replicate,seed,time_averaged_sigma,final_sigma,fight_rate\n";
  if (cfg.sample_stride > 0) result.trajectory_csv = "cell,replicate," + trajectory_csv_header() + "\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const ExperimentConfig& cc = cells[c].config;
    SweepRow row;
    row.cell = c;
    row.model = std::string(to_string(cc.model));
    row.graph_id = graphs[c]->label();
    row.n = graphs[c]->order();
    row.eta = cc.eta;
    row.F = cc.F;
    row.mu = cc.mu;
    row.rho = cc.model == Model::bonabeau_lattice ? cc.rho : 1.0;
    row.steps = cc.steps;
    row.warmup = cc.warmup;
    row.measure_window = cc.measure_window;
    row.replicates = reps;
    row.master_seed = cfg.master_seed;
    row.predicted = predicted[c];
    double sum = 0.0;
    double rate = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& o = outcomes[c * reps + r];
      sum += o.time_averaged_sigma;
      rate += o.fight_rate;
      result.raw_csv += csv_join({std::to_string(c), std::to_string(r), std::to_string(o.seed),
                                  fmt17(o.time_averaged_sigma), fmt17(o.final_sigma), fmt17(o.fight_rate)}) +
                        "\n";
      for (const auto& smp : o.samples) {
        result.trajectory_csv += std::to_string(c) + "," + std::to_string(r) + "," + to_csv_row(smp) + "\n";
      }
    }
    row.mean_sigma = sum / static_cast<double>(reps);
    row.fight_rate = rate / static_cast<double>(reps);
    if (reps > 1) {
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = outcomes[c * reps + r].time_averaged_sigma - row.mean_sigma;
        ss += d * d;
      }
      row.sd_sigma = std::sqrt(ss / static_cast<double>(reps - 1));
    }
    result.csv += to_csv_row(row) + "\n";
    result.rows.push_back(std::move(row));
  }
  return result;
}

// ---------------------------------------------------------------- competing

CompetingResult cmd_competing(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.model != Model::competing) throw ConfigError("model", "the competing command needs model = competing");
  const auto cells = expand_cells(cfg);
  std::vector<std::unique_ptr<SiteGraph>> graphs;
  for (const auto& cell : cells) {
    graphs.push_back(std::make_unique<SiteGraph>(build_cell_graph(cell)));
    if (graphs.back()->edge_count() == 0) throw ConfigError("graph", "competing dynamics needs at least one edge");
  }

  const std::size_t reps = cfg.replicates;
  std::vector<TerminationResult> results(cells.size() * reps);
  parallel_for(results.size(), threads, [&](std::size_t task) {
    const std::size_t c = task / reps;
    Rng rng(replicate_seed(cfg, c, task % reps));
    results[task] = run_to_termination(*graphs[c], cells[c].config.competing_params(), rng, cfg.step_cap, false);
  });

  CompetingResult out;
  out.csv = termination_csv_header() + "\n";
  char line[256];
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const SiteGraph& g = *graphs[c];
    std::vector<std::uint64_t> fights;
    std::size_t terminal = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& res = results[c * reps + r];
      out.csv += termination_csv_row(g.label(), g.order(), cells[c].config.ell, replicate_seed(cfg, c, r), res) + "\n";
      fights.push_back(res.fights);
      terminal += res.terminal ? 1 : 0;
    }
    out.all_terminal = out.all_terminal && terminal == reps;
    std::sort(fights.begin(), fights.end());
    auto quantile = [&](double q) { return fights[static_cast<std::size_t>(q * static_cast<double>(fights.size() - 1))]; };
    std::snprintf(line, sizeof line,
                  "cell %zu graph %s ell %lld: %zu/%zu terminal; fights min %llu median %llu p90 %llu max %llu\n", c,
                  g.label().c_str(), static_cast<long long>(cells[c].config.ell), terminal, reps,
                  static_cast<unsigned long long>(fights.front()), static_cast<unsigned long long>(quantile(0.5)),
                  static_cast<unsigned long long>(quantile(0.9)), static_cast<unsigned long long>(fights.back()));
    out.summary += line;
  }
  return out;
}

// ------------------------------------------------------------------- verify

VerifyResult cmd_verify(const ExperimentConfig& cfg) {
  const SiteGraph g = cfg.graph.build();
  if (g.order() > kMaxEnumerationAgents) {
    throw OracleError("verify needs an enumeration-scale graph (at most " + std::to_string(kMaxEnumerationAgents) +
                      " vertices)");
  }
  if (g.edge_count() == 0) throw ConfigError("graph", "verification needs at least one edge");
  const CompetingParams p = cfg.competing_params();
  Rng rng(derive_seed(cfg.master_seed, 0, 0));

  VerifyResult result;
  // The zero state (zero steps) always has a fight available, so the suite
  // never degenerates to terminal states only.
  std::vector<CompetingState> states{CompetingState::zeros(g.order())};
  for (auto& s : reachable_states(g, p, cfg.verify_states, rng)) states.push_back(std::move(s));
  verify_submartingale(states, g, p, result.report);
  verify_jacobian(g, cfg.bonabeau_params(), cfg.verify_fd_eps, 1e-6, result.report);

  const std::vector<CompetingState> sampled(states.begin(), states.begin() + std::min<std::size_t>(states.size(), 10));
  verify_engine_agreement(sampled, g, p, cfg.verify_samples, rng, result.report);

  char head[256];
  std::snprintf(head, sizeof head, "# verify graph=%s n=%zu edges=%zu ell=%lld seed=%llu states=%zu samples=%zu\n",
                g.label().c_str(), g.order(), g.edge_count(), static_cast<long long>(p.ell),
                static_cast<unsigned long long>(cfg.master_seed), states.size(), cfg.verify_samples);
  result.text = head + result.report.to_text();
  return result;
}

// ---------------------------------------------------------------- meanfield

std::string cmd_meanfield(const ExperimentConfig& cfg) {
  const SiteGraph g = cfg.graph.build();
  const BonabeauParams p = cfg.bonabeau_params();
  const MeanfieldConfig mf = MeanfieldConfig::make(p.mu, p.F, g.order());
  Rng rng(derive_seed(cfg.master_seed, 0, 0));
  PowerState state = perturbed_zero_state(g.order(), cfg.init_perturbation, rng);

  const double h0 = mean(state.h);
  double recursion = h0;
  std::string out = "t,mean_recursion,mean_closed_form,map_mean,map_sigma,mean_limit\n";
  auto emit = [&](std::uint64_t t) {
    out += csv_join({std::to_string(t), fmt17(recursion), fmt17(mean_closed_form(h0, t, mf)), fmt17(mean(state.h)),
                     fmt17(sigma(state.h)), fmt17(mean_limit(mf))}) +
           "\n";
  };
  emit(0);
  for (std::uint64_t t = 1; t <= cfg.meanfield_iterations; ++t) {
    recursion = mean_step(recursion, mf);
    state.h = meanfield_agent_map(state.h, g, p);
    emit(t);
  }
  return out;
}

}  // namespace bonabeau::experiments
