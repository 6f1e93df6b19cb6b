#pragma once

// Library side of the command-line front end. Every command returns its
// output documents as strings so they can be tested without touching disk.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bonabeau/experiments/config.hpp"
#include "bonabeau/oracle.hpp"

namespace bonabeau::experiments {

/// One row of stability.csv per sweep cell.
std::string cmd_stability(const ExperimentConfig& cfg);

struct SweepRow {
  std::size_t cell = 0;
  std::string model;
  std::string graph_id;
  std::size_t n = 0;
  double eta = 0.0;
  double F = 0.0;
  double mu = 0.0;
  double rho = 1.0;
  std::uint64_t steps = 0;
  std::uint64_t warmup = 0;
  std::uint64_t measure_window = 0;
  std::uint64_t replicates = 0;
  std::uint64_t master_seed = 0;
  double mean_sigma = 0.0;  // mean over replicates of the time-averaged sigma
  double sd_sigma = 0.0;    // sample standard deviation over replicates
  double fight_rate = 0.0;
  std::string predicted;    // stability classification, "n/a" off the fully occupied model

  /// Column value by CSV header name (numeric columns only).
  double value(std::string_view column) const;
};

std::string sweep_csv_header();
std::string to_csv_row(const SweepRow& row);
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv;      // sweep.csv
  std::string raw_csv;  // sweep_raw.csv: one line per replicate
  std::string trajectory_csv;  // sweep_trajectories.csv; empty unless run.sample_stride > 0
};

/// Runs every cell x replicate (in parallel over `threads` workers) and
/// aggregates in (cell, replicate) order, so output does not depend on the
/// thread count.
SweepResult cmd_sweep(const ExperimentConfig& cfg, unsigned threads);

struct CompetingResult {
  std::string csv;      // termination.csv
  std::string summary;  // per-cell fight-count quantiles
  bool all_terminal = true;
};

CompetingResult cmd_competing(const ExperimentConfig& cfg, unsigned threads);

struct VerifyResult {
  VerificationReport report;
  std::string text;
  bool passed() const { return report.passed(); }
};

/// Submartingale, Jacobian finite-difference and engine-vs-oracle suites on
/// the configured (enumeration-scale) graph.
VerifyResult cmd_verify(const ExperimentConfig& cfg);

/// Mean-field trajectory: recursion, closed form, and the per-agent map.
std::string cmd_meanfield(const ExperimentConfig& cfg);

/// Seed of replicate r in cell c (see derive_seed).
std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t cell, std::size_t replicate);

}  // namespace bonabeau::experiments
