// bonabeau: command-line front end for stability tables, simulation sweeps,
// competing-model termination studies, mean-field trajectories, oracle
// verification and SVG plots.
//
// Exit codes: 0 success, 1 validation error, 2 verification failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "bonabeau/experiments/commands.hpp"
#include "bonabeau/experiments/config.hpp"
#include "bonabeau/experiments/svg_plot.hpp"
#include "bonabeau/spectral.hpp"

namespace fs = std::filesystem;
using namespace bonabeau;
using namespace bonabeau::experiments;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  unsigned threads = 0;
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--input", "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig load(const GlobalOptions& g) {
  if (g.config_path.empty()) throw ConfigError("--config", "a config file is required");
  ExperimentConfig cfg = load_config(g.config_path);
  if (g.seed) cfg.master_seed = *g.seed;
  return cfg;
}

unsigned thread_count(const GlobalOptions& g) {
  if (g.threads > 0) return g.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Run metadata excludes timestamps and thread counts so repeated runs are
// byte-identical.
void write_metadata(const GlobalOptions& g, const std::string& command, const ExperimentConfig& cfg) {
  nlohmann::json meta;
  meta["command"] = command;
  meta["config"] = cfg.to_json();
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  meta["config_hash"] = hash;
  meta["seed_mixing"] = "splitmix64 chain over (master_seed, cell, replicate)";
  write_file(fs::path(g.out_dir) / (command + "_meta.json"), meta.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bonabeau dominance-hierarchy simulation and stability toolkit"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--config", global.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", global.seed, "override run.seed");
  app.add_option("--out", global.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads (default: hardware concurrency)");

  auto* stability = app.add_subcommand("stability", "stability table over the sweep grid");
  auto* sweep = app.add_subcommand("sweep", "simulate every sweep cell and aggregate time-averaged sigma");
  auto* competing = app.add_subcommand("competing", "competing-model termination study");
  auto* meanfield = app.add_subcommand("meanfield", "mean-field recursion and agent map trajectory");
  auto* verify = app.add_subcommand("verify", "exact-oracle verification suites");
  auto* plot = app.add_subcommand("plot", "SVG plot of a sweep CSV");
  std::string plot_input;
  PlotAxes axes;
  plot->add_option("--input", plot_input, "sweep CSV (default: <out>/sweep.csv)");
  plot->add_option("--x", axes.x, "column on the horizontal axis")->capture_default_str();
  plot->add_option("--y", axes.y, "plotted column")->capture_default_str();
  plot->add_option("--series", axes.series, "one line per distinct value of this column")->capture_default_str();
  for (auto* sub : {stability, sweep, competing, meanfield, verify, plot}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out(global.out_dir);
    if (*stability) {
      const auto cfg = load(global);
      write_file(out / "stability.csv", cmd_stability(cfg));
      write_metadata(global, "stability", cfg);
    } else if (*sweep) {
      const auto cfg = load(global);
      const auto result = cmd_sweep(cfg, thread_count(global));
      write_file(out / "sweep.csv", result.csv);
      write_file(out / "sweep_raw.csv", result.raw_csv);
      if (!result.trajectory_csv.empty()) write_file(out / "sweep_trajectories.csv", result.trajectory_csv);
      write_metadata(global, "sweep", cfg);
    } else if (*competing) {
      const auto cfg = load(global);
      const auto result = cmd_competing(cfg, thread_count(global));
      write_file(out / "termination.csv", result.csv);
      write_file(out / "termination_summary.txt", result.summary);
      write_metadata(global, "competing", cfg);
      std::cout << result.summary;
    } else if (*meanfield) {
      const auto cfg = load(global);
      write_file(out / "meanfield.csv", cmd_meanfield(cfg));
      write_metadata(global, "meanfield", cfg);
    } else if (*verify) {
      const auto cfg = load(global);
      const auto result = cmd_verify(cfg);
      write_file(out / "verify.txt", result.text);
      write_metadata(global, "verify", cfg);
      std::cout << result.text;
      if (!result.passed()) return kExitVerification;
    } else if (*plot) {
      const fs::path input = plot_input.empty() ? out / "sweep.csv" : fs::path(plot_input);
      write_file(out / "plot.svg", emit_svg_plot(parse_sweep_csv(read_file(input)), axes));
    }
  } catch (const std::invalid_argument& e) {
    // ConfigError, ParameterError, GraphError, SpectralError, OracleError
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
