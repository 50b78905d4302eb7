#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trac/harness.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) seeds.push_back(std::stoull(cell));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tracbench: lifelong-learning optimizer bench (PPO on shifting CartPole "
      "plus an online-convex-optimization suite).\n"
      "Outputs land under --out, else $TRACBENCH_OUT, else ./runs.\n"
      "Per run: run_seed<k>.csv (one row per update), run_seed<k>_episodes.csv\n"
      "(one row per episode), run_seed<k>_scaling.csv (one row per optimizer\n"
      "step when the optimizer exposes a scaling trace), run_seed<k>_summary.json.\n"
      "Per experiment: aggregate.csv / aggregate.json (across-seed mean and\n"
      "sample standard deviation)."};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config file");
  std::string config_path;
  std::string seeds_override;
  std::string out_override;
  int workers_override = -1;
  run->add_option("--config", config_path, "Path to the experiment config (JSON)")
      ->required();
  run->add_option("--seeds", seeds_override,
                  "Comma-separated seed list overriding the config");
  run->add_option("--workers", workers_override,
                  "Number of parallel seed workers (default: config, then hardware)");
  run->add_option("--out", out_override, "Output root directory");

  // aggregate
  auto* agg = app.add_subcommand(
      "aggregate", "Recompute aggregates from persisted runs in a directory");
  std::string agg_dir;
  std::string baseline = "adam";
  agg->add_option("dir", agg_dir, "Experiment directory or output root")->required();
  agg->add_option("--baseline", baseline,
                  "Baseline experiment for the normalized-improvement column "
                  "(root mode only)");

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Emit tidy CSV for plotting");
  std::string plot_dir;
  std::string plot_kind = "reward_curve";
  std::string plot_out;
  plot->add_option("--dir", plot_dir, "Experiment directory")->required();
  plot->add_option("--kind", plot_kind,
                   "Series: reward_curve | scaling_trace | lambda_bars");
  plot->add_option("--out", plot_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      trac::ExperimentConfig config = trac::ExperimentConfig::load(config_path);
      if (!seeds_override.empty()) config.seeds = parse_seed_list(seeds_override);
      if (workers_override >= 0) config.workers = workers_override;
      const auto out_root = trac::resolve_out_root(
          !out_override.empty() ? out_override : config.out_dir);
      trac::run_experiment(config, out_root);
      std::cout << "wrote " << (out_root / trac::to_string(config.experiment)).string()
                << "\n";
    } else if (agg->parsed()) {
      const std::filesystem::path dir(agg_dir);
      if (!trac::list_run_summaries(dir).empty()) {
        const auto summary = trac::write_aggregate_files(dir);
        std::cout << "runs=" << summary.runs
                  << " cumulative_reward_mean=" << summary.cumulative_reward_mean
                  << " +/- " << summary.cumulative_reward_std << "\n";
      } else {
        bool any = false;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
          if (entry.is_directory() &&
              !trac::list_run_summaries(entry.path()).empty()) {
            trac::write_aggregate_files(entry.path());
            any = true;
          }
        }
        if (!any) {
          std::cerr << "no run summaries found under " << dir << "\n";
          return 2;
        }
        if (std::filesystem::exists(dir / baseline)) {
          trac::write_comparison(dir, baseline);
          std::cout << "wrote " << (dir / "comparison.csv").string() << "\n";
        }
      }
    } else if (plot->parsed()) {
      trac::emit_plot_data(plot_dir, trac::plot_kind_from_string(plot_kind),
                           plot_out);
      std::cout << "wrote " << plot_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
