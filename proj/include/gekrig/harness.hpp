#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gekrig/benchmarks.hpp"
#include "gekrig/models.hpp"

namespace gekrig {

/// One cell of an experiment grid.
///
/// `n` is the sample budget of the value-only models; gradient-based models
/// train on n / 2 samples (n must then be even).
struct ExperimentConfig {
  std::string function = "y1:10";
  ModelKind model = ModelKind::Kriging;
  std::size_t n = 20;
  std::size_t h = 3;
  std::size_t m = 1;
  double fota_step = 1e-4;
  std::size_t trials = 10;
  std::size_t n_validation = 5000;
  std::uint64_t base_seed = 0;
  FormulaMode mode = FormulaMode::AsPrinted;
  /// Overrides for the optimizer; zero keeps the FitOptions defaults.
  std::size_t starts = 0;
  std::size_t budget_per_start = 0;

  void validate() const;
  std::size_t training_samples() const;
  FitOptions fit_options(std::uint64_t seed) const;
};

struct ExperimentRecord {
  std::string function;
  Eigen::Index d = 0;
  std::string model;
  std::size_t h = 0;
  std::size_t m = 0;
  std::size_t n = 0;  // samples actually used for training
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double re = 0.0;           // NaN when the trial failed
  double fit_seconds = 0.0;  // NaN when the trial failed
  double nugget = 0.0;
  /// Concentrated log-likelihood at the optimum; stage1_cll is KPLSK only.
  double cll = std::numeric_limits<double>::quiet_NaN();
  double stage1_cll = std::numeric_limits<double>::quiet_NaN();

  bool failed() const;
  bool operator==(const ExperimentRecord& other) const;
};

/// Seed of trial t: base_seed + t. The training plan is a maximin LHS drawn
/// with that seed, the validation plan a random LHS drawn with a derived seed.
std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial);
std::uint64_t validation_seed(std::uint64_t trial_seed);

/// One trial. Fit failures produce a failed record instead of throwing.
ExperimentRecord run_trial(const ExperimentConfig& cfg, std::size_t trial);

/// All trials of a configuration, in trial order (OpenMP over trials).
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

/// Every trial of every configuration, ordered by (config index, trial)
/// whatever the completion order (OpenMP over the flattened work list).
std::vector<ExperimentRecord> run_experiments(const std::vector<ExperimentConfig>& configs);

struct SummaryRow {
  std::string function;
  Eigen::Index d = 0;
  std::string model;
  std::size_t h = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t failed = 0;
  double mean_re = 0.0;           // NaN when every trial failed
  double mean_fit_seconds = 0.0;  // NaN when every trial failed

  bool operator==(const SummaryRow& other) const;
};

/// Means over successful trials, grouped by (function, d, model, h, m, n) in
/// first-seen order.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

inline constexpr const char* kRecordsHeader = "function,d,model,h,m,n,trial,seed,re,fit_seconds,nugget,cll,stage1_cll";
inline constexpr const char* kSummaryHeader = "function,d,model,h,m,n,trials,failed,mean_re,mean_fit_seconds";

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

/// Study preset or ad-hoc grid loaded from JSON.
///
///   {"name": "...", "trials": 10, "n_validation": 5000, "base_seed": 0,
///    "cells": [{"functions": ["y1:10"], "models": ["kriging", "gekpls"],
///               "n": [20, 100], "h": [3], "m": [1, 2], "fota_step": 1e-4}]}
///
/// `h` applies to KPLS/KPLSK, GE-KPLS always uses `gekpls_h` (default 1);
/// `m` only multiplies GE-KPLS cells and `"m_equals_d": true` adds m = d.
/// Optional top-level keys: starts, budget_per_start, mode ("corrected").
std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path, bool desk_scale = false);
std::vector<ExperimentConfig> parse_grid(const std::string& json_text, bool desk_scale = false);

/// Desk-scale caps applied by --desk-scale.
inline constexpr Eigen::Index kDeskMaxDim = 20;
inline constexpr std::size_t kDeskMaxSamples = 200;

struct StepSweepRow {
  double fota_step = 0.0;
  double mean_re = 0.0;
  double mean_fit_seconds = 0.0;
  std::size_t failed = 0;
};

/// Runs `cfg` once per step of {1e-6, 1e-5, ..., 1e-2, 5e-2} and reports mean RE.
/// The top of the grid stays below 0.1, the largest admissible step.
std::vector<StepSweepRow> sweep_step(const ExperimentConfig& cfg,
                                     const std::vector<double>& steps = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2});
/// Step with the smallest mean RE (first on ties).
double best_step(const std::vector<StepSweepRow>& rows);

/// Applies GEKRIG_THREADS, when set, to the OpenMP pool.
void configure_threads_from_env();

}  // namespace gekrig
