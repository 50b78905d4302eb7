#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trac/ppo.hpp"

namespace trac {

enum class ExperimentKind {
  kTrac,
  kAdam,
  kCreluAdam,
  kL2Sweep,
  kWeightDecaySweep,
  kPrivilegedReset,
  kWarmstartTrac,
  kWarmstartAdam,
  kOcoBench,
  kSimplifiedEquivalence,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct OptimizerOptions {
  std::vector<double> betas = kDefaultBetaGrid;
  double eps = 1e-8;
  int warm_steps = 30;
  std::string h_mode = "meta_offset";  // or "base_offset"
  bool tuner_clamp_at_zero = false;
  std::vector<double> lambda_grid = {0.2, 0.8, 1,  5,  10, 15, 20,
                                     25,  30,  35, 40, 45, 50};
  std::vector<double> weight_decay_grid = {0.0001, 0.001, 0.01, 0.1, 1.0,
                                           5.0,    10.0,  15.0, 50.0};
};

struct OcoOptions {
  int stationary_horizon = 500;
  int task_length = 200;
  int num_tasks = 10;
  double gd_lr = 2.1;       // deliberately mis-tuned (10x a sensible 0.21)
  double center_scale = 1.0;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kTrac;
  std::vector<std::uint64_t> seeds;  // defaults to 0..24
  std::int64_t total_env_steps = 24000;
  int workers = 0;  // 0: pick from hardware
  std::string out_dir;
  ShiftOptions env;
  PpoConfig ppo;
  OptimizerOptions optimizer;
  OcoOptions oco;
  // one trunk with policy and value heads (the control-experiment default);
  // set false for separate towers
  bool shared_trunk = true;

  ExperimentConfig();

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

// Mean and standard deviation (population, matching the plotting
// convention) of per-run headline metrics.
struct AggregateSummary {
  int runs = 0;
  double cumulative_reward_mean = 0.0;
  double cumulative_reward_std = 0.0;
  double post_first_shift_mean = 0.0;
  double post_first_shift_std = 0.0;
};

AggregateSummary aggregate(const std::vector<RunSummary>& records);

// (R_a - R_b) / |R_b|
double normalized_improvement(double reward_a, double reward_b);

// Output root resolution: explicit override, then the TRACBENCH_OUT
// environment variable, then ./runs.
std::filesystem::path resolve_out_root(const std::string& override_dir);

struct RunContext {
  std::filesystem::path dir;  // experiment output directory
};

// Executes all seeds of the experiment (seed-parallel), persisting one set
// of metrics files per run plus aggregate files. Returns the records in seed
// order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const std::filesystem::path& out_root);

// ---- persistence helpers (shared by the CLI and tests) ----

void write_run_files(const std::filesystem::path& dir, std::uint64_t seed,
                     const RunRecord& record, double wall_time_s);
RunSummary read_run_summary(const std::filesystem::path& summary_json);
std::vector<std::filesystem::path> list_run_summaries(
    const std::filesystem::path& experiment_dir);

// Writes aggregate.csv + aggregate.json for one experiment directory from
// the persisted per-run summaries (a pure function of the raw rows).
AggregateSummary write_aggregate_files(const std::filesystem::path& experiment_dir);

enum class PlotKind { kRewardCurve, kScalingTrace, kLambdaBars };
PlotKind plot_kind_from_string(const std::string& name);

// Tidy CSV for external plotting; columns documented in the file header.
void emit_plot_data(const std::filesystem::path& experiment_dir, PlotKind kind,
                    const std::filesystem::path& out_file);

// Cross-experiment comparison table (normalized improvement vs a baseline
// experiment subdirectory) written to comparison.csv under the root.
void write_comparison(const std::filesystem::path& out_root,
                      const std::string& baseline_experiment);

}  // namespace trac
