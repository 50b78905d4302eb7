#include "trac/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "trac/oco.hpp"
#include "trac/simplified_check.hpp"

namespace trac {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.columns.empty()) {
      t.columns = cells;
      continue;
    }
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) row[i] = std::stod(cells[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

int column_index(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return static_cast<int>(i);
  }
  throw std::runtime_error("missing column " + name);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTrac: return "trac";
    case ExperimentKind::kAdam: return "adam";
    case ExperimentKind::kCreluAdam: return "crelu_adam";
    case ExperimentKind::kL2Sweep: return "l2_sweep";
    case ExperimentKind::kWeightDecaySweep: return "weight_decay_sweep";
    case ExperimentKind::kPrivilegedReset: return "privileged_reset";
    case ExperimentKind::kWarmstartTrac: return "warmstart_trac";
    case ExperimentKind::kWarmstartAdam: return "warmstart_adam";
    case ExperimentKind::kOcoBench: return "oco_bench";
    case ExperimentKind::kSimplifiedEquivalence: return "simplified_equivalence";
  }
  throw std::logic_error("unknown experiment kind");
}

ExperimentKind experiment_from_string(const std::string& name) {
  static const std::map<std::string, ExperimentKind> table = {
      {"trac", ExperimentKind::kTrac},
      {"adam", ExperimentKind::kAdam},
      {"crelu_adam", ExperimentKind::kCreluAdam},
      {"l2_sweep", ExperimentKind::kL2Sweep},
      {"weight_decay_sweep", ExperimentKind::kWeightDecaySweep},
      {"privileged_reset", ExperimentKind::kPrivilegedReset},
      {"warmstart_trac", ExperimentKind::kWarmstartTrac},
      {"warmstart_adam", ExperimentKind::kWarmstartAdam},
      {"oco_bench", ExperimentKind::kOcoBench},
      {"simplified_equivalence", ExperimentKind::kSimplifiedEquivalence},
  };
  auto it = table.find(name);
  if (it == table.end()) {
    throw std::invalid_argument("unknown experiment: " + name);
  }
  return it->second;
}

ExperimentConfig::ExperimentConfig() {
  for (std::uint64_t s = 0; s < 25; ++s) seeds.push_back(s);
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = trac::to_string(experiment);
  j["seeds"] = seeds;
  j["total_env_steps"] = total_env_steps;
  j["workers"] = workers;
  j["out_dir"] = out_dir;
  j["env"] = {{"shift_period", env.period},
              {"offset_range", env.offset_range},
              {"signed_offsets", env.signed_offsets}};
  j["ppo"] = {{"steps_per_update", ppo.steps_per_update},
              {"minibatch_size", ppo.minibatch_size},
              {"epochs_per_update", ppo.epochs_per_update},
              {"clip_eps", ppo.clip_eps},
              {"value_coeff", ppo.value_coeff},
              {"entropy_coeff", ppo.entropy_coeff},
              {"base_lr", ppo.base_lr},
              {"gamma", ppo.gamma},
              {"gae_lambda", ppo.gae_lambda},
              {"advantage_norm", ppo.advantage_norm == AdvNorm::kNone
                                     ? "none"
                                     : ppo.advantage_norm == AdvNorm::kPerUpdate
                                           ? "per_update"
                                           : "per_minibatch"}};
  j["optimizer"] = {{"betas", optimizer.betas},
                    {"eps", optimizer.eps},
                    {"warm_steps", optimizer.warm_steps},
                    {"h_mode", optimizer.h_mode},
                    {"tuner_clamp_at_zero", optimizer.tuner_clamp_at_zero},
                    {"lambda_grid", optimizer.lambda_grid},
                    {"weight_decay_grid", optimizer.weight_decay_grid}};
  j["nn"] = {{"shared_trunk", shared_trunk}};
  j["oco"] = {{"stationary_horizon", oco.stationary_horizon},
              {"task_length", oco.task_length},
              {"num_tasks", oco.num_tasks},
              {"gd_lr", oco.gd_lr},
              {"center_scale", oco.center_scale}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("total_env_steps")) c.total_env_steps = j["total_env_steps"];
  if (j.contains("workers")) c.workers = j["workers"];
  if (j.contains("out_dir")) c.out_dir = j["out_dir"];
  if (j.contains("env")) {
    const json& e = j["env"];
    if (e.contains("shift_period")) c.env.period = e["shift_period"];
    if (e.contains("offset_range")) c.env.offset_range = e["offset_range"];
    if (e.contains("signed_offsets")) c.env.signed_offsets = e["signed_offsets"];
  }
  if (j.contains("ppo")) {
    const json& p = j["ppo"];
    if (p.contains("steps_per_update")) c.ppo.steps_per_update = p["steps_per_update"];
    if (p.contains("minibatch_size")) c.ppo.minibatch_size = p["minibatch_size"];
    if (p.contains("epochs_per_update")) c.ppo.epochs_per_update = p["epochs_per_update"];
    if (p.contains("clip_eps")) c.ppo.clip_eps = p["clip_eps"];
    if (p.contains("value_coeff")) c.ppo.value_coeff = p["value_coeff"];
    if (p.contains("entropy_coeff")) c.ppo.entropy_coeff = p["entropy_coeff"];
    if (p.contains("base_lr")) c.ppo.base_lr = p["base_lr"];
    if (p.contains("gamma")) c.ppo.gamma = p["gamma"];
    if (p.contains("gae_lambda")) c.ppo.gae_lambda = p["gae_lambda"];
    if (p.contains("advantage_norm")) {
      const std::string mode = p["advantage_norm"];
      if (mode == "none") {
        c.ppo.advantage_norm = AdvNorm::kNone;
      } else if (mode == "per_update") {
        c.ppo.advantage_norm = AdvNorm::kPerUpdate;
      } else if (mode == "per_minibatch") {
        c.ppo.advantage_norm = AdvNorm::kPerMinibatch;
      } else {
        throw std::invalid_argument("unknown advantage_norm: " + mode);
      }
    }
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    if (o.contains("betas")) c.optimizer.betas = o["betas"].get<std::vector<double>>();
    if (o.contains("eps")) c.optimizer.eps = o["eps"];
    if (o.contains("warm_steps")) c.optimizer.warm_steps = o["warm_steps"];
    if (o.contains("h_mode")) c.optimizer.h_mode = o["h_mode"];
    if (o.contains("tuner_clamp_at_zero"))
      c.optimizer.tuner_clamp_at_zero = o["tuner_clamp_at_zero"];
    if (o.contains("lambda_grid"))
      c.optimizer.lambda_grid = o["lambda_grid"].get<std::vector<double>>();
    if (o.contains("weight_decay_grid"))
      c.optimizer.weight_decay_grid = o["weight_decay_grid"].get<std::vector<double>>();
  }
  if (j.contains("nn")) {
    const json& n = j["nn"];
    if (n.contains("shared_trunk")) c.shared_trunk = n["shared_trunk"];
  }
  if (j.contains("oco")) {
    const json& o = j["oco"];
    if (o.contains("stationary_horizon")) c.oco.stationary_horizon = o["stationary_horizon"];
    if (o.contains("task_length")) c.oco.task_length = o["task_length"];
    if (o.contains("num_tasks")) c.oco.num_tasks = o["num_tasks"];
    if (o.contains("gd_lr")) c.oco.gd_lr = o["gd_lr"];
    if (o.contains("center_scale")) c.oco.center_scale = o["center_scale"];
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void ExperimentConfig::save(const fs::path& file) const {
  std::ofstream out(file);
  out << to_json() << "\n";
}

AggregateSummary aggregate(const std::vector<RunSummary>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate: no records");
  }
  AggregateSummary a;
  a.runs = static_cast<int>(records.size());
  for (const RunSummary& r : records) {
    a.cumulative_reward_mean += r.cumulative_mean_episode_reward;
    a.post_first_shift_mean += r.post_first_shift_mean_reward;
  }
  a.cumulative_reward_mean /= a.runs;
  a.post_first_shift_mean /= a.runs;
  if (a.runs > 1) {
    double vc = 0.0;
    double vp = 0.0;
    for (const RunSummary& r : records) {
      vc += (r.cumulative_mean_episode_reward - a.cumulative_reward_mean) *
            (r.cumulative_mean_episode_reward - a.cumulative_reward_mean);
      vp += (r.post_first_shift_mean_reward - a.post_first_shift_mean) *
            (r.post_first_shift_mean_reward - a.post_first_shift_mean);
    }
    a.cumulative_reward_std = std::sqrt(vc / a.runs);
    a.post_first_shift_std = std::sqrt(vp / a.runs);
  }
  return a;
}

double normalized_improvement(double reward_a, double reward_b) {
  return (reward_a - reward_b) / std::abs(reward_b);
}

fs::path resolve_out_root(const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("TRACBENCH_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "runs";
}

void write_run_files(const fs::path& dir, std::uint64_t seed,
                     const RunRecord& record, double wall_time_s) {
  fs::create_directories(dir);
  const std::string stem = "run_seed" + std::to_string(seed);

  {
    std::ofstream out(dir / (stem + ".csv"));
    out << "# one row per optimizer update\n";
    out << "update,global_step,task_index,episodes,mean_episode_reward,"
           "mean_loss,has_scaling,mean_S,final_S\n";
    for (const UpdateRow& r : record.updates) {
      out << r.update << ',' << r.global_step << ',' << r.task_index << ','
          << r.episodes_completed << ',' << fmt(r.mean_episode_reward) << ','
          << fmt(r.mean_loss) << ',' << (r.has_scaling ? 1 : 0) << ','
          << fmt(r.mean_scaling) << ',' << fmt(r.final_scaling) << '\n';
    }
  }
  {
    std::ofstream out(dir / (stem + "_episodes.csv"));
    out << "# one row per completed episode\n";
    out << "episode,start_step,start_task,length,reward\n";
    for (std::size_t i = 0; i < record.episodes.size(); ++i) {
      const EpisodeRecord& e = record.episodes[i];
      out << i << ',' << e.start_step << ',' << e.start_task << ',' << e.length
          << ',' << fmt(e.reward) << '\n';
    }
  }
  if (!record.scaling.empty()) {
    std::ofstream out(dir / (stem + "_scaling.csv"));
    out << "# one row per optimizer step; s_j are the per-tuner outputs\n";
    out << "opt_step,S";
    for (std::size_t j = 0; j < record.scaling.front().tuner_outputs.size(); ++j) {
      out << ",s_" << j;
    }
    out << '\n';
    for (const ScalingRow& r : record.scaling) {
      out << r.opt_step << ',' << fmt(r.scaling);
      for (double s : r.tuner_outputs) out << ',' << fmt(s);
      out << '\n';
    }
  }
  {
    json j;
    j["seed"] = seed;
    j["cumulative_mean_episode_reward"] = record.summary.cumulative_mean_episode_reward;
    j["post_first_shift_mean_reward"] = record.summary.post_first_shift_mean_reward;
    j["task_count"] = record.summary.task_count;
    json per_task = json::object();
    for (const auto& [task, mean_s] : record.summary.mean_scaling_per_task) {
      per_task[std::to_string(task)] = mean_s;
    }
    j["mean_scaling_per_task"] = per_task;
    j["wall_time_s"] = wall_time_s;
    std::ofstream out(dir / (stem + "_summary.json"));
    out << j.dump(2) << "\n";
  }
}

RunSummary read_run_summary(const fs::path& summary_json) {
  std::ifstream in(summary_json);
  if (!in) throw std::runtime_error("cannot open " + summary_json.string());
  json j;
  in >> j;
  RunSummary s;
  s.seed = j.at("seed");
  s.cumulative_mean_episode_reward = j.at("cumulative_mean_episode_reward");
  s.post_first_shift_mean_reward = j.at("post_first_shift_mean_reward");
  s.task_count = j.at("task_count");
  for (const auto& [key, value] : j.at("mean_scaling_per_task").items()) {
    s.mean_scaling_per_task[std::stoi(key)] = value;
  }
  return s;
}

std::vector<fs::path> list_run_summaries(const fs::path& experiment_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(experiment_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_seed", 0) == 0 &&
        name.find("_summary.json") != std::string::npos) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

AggregateSummary write_aggregate_files(const fs::path& experiment_dir) {
  std::vector<RunSummary> summaries;
  for (const fs::path& f : list_run_summaries(experiment_dir)) {
    summaries.push_back(read_run_summary(f));
  }
  std::sort(summaries.begin(), summaries.end(),
            [](const RunSummary& a, const RunSummary& b) { return a.seed < b.seed; });
  const AggregateSummary agg = aggregate(summaries);

  {
    std::ofstream out(experiment_dir / "aggregate.csv");
    out << "# across-seed aggregate; std is the standard deviation across seeds\n";
    out << "runs,cumulative_reward_mean,cumulative_reward_std,"
           "post_first_shift_mean,post_first_shift_std\n";
    out << agg.runs << ',' << fmt(agg.cumulative_reward_mean) << ','
        << fmt(agg.cumulative_reward_std) << ',' << fmt(agg.post_first_shift_mean)
        << ',' << fmt(agg.post_first_shift_std) << '\n';
  }
  {
    json j;
    j["runs"] = agg.runs;
    j["cumulative_reward_mean"] = agg.cumulative_reward_mean;
    j["cumulative_reward_std"] = agg.cumulative_reward_std;
    j["post_first_shift_mean"] = agg.post_first_shift_mean;
    j["post_first_shift_std"] = agg.post_first_shift_std;
    json per_seed = json::array();
    for (const RunSummary& s : summaries) {
      per_seed.push_back({{"seed", s.seed},
                          {"cumulative_mean_episode_reward",
                           s.cumulative_mean_episode_reward},
                          {"post_first_shift_mean_reward",
                           s.post_first_shift_mean_reward}});
    }
    j["per_seed"] = per_seed;
    std::ofstream out(experiment_dir / "aggregate.json");
    out << j.dump(2) << "\n";
  }
  return agg;
}

namespace {

Activation activation_for(ExperimentKind kind) {
  return kind == ExperimentKind::kCreluAdam ? Activation::kCrelu
                                            : Activation::kRelu;
}

TracConfig trac_config_from(const OptimizerOptions& opt) {
  TracConfig cfg;
  cfg.betas = opt.betas;
  cfg.eps = opt.eps;
  cfg.s_floor = opt.eps;
  cfg.h_mode = opt.h_mode == "base_offset" ? HMode::kBaseOffset : HMode::kMetaOffset;
  cfg.tuner_clamp_at_zero = opt.tuner_clamp_at_zero;
  return cfg;
}

OptimizerFactory make_factory(const ExperimentConfig& config, double sweep_value) {
  const ExperimentKind kind = config.experiment;
  const double lr = config.ppo.base_lr;
  const OptimizerOptions opt = config.optimizer;
  const Activation act = activation_for(kind);

  switch (kind) {
    case ExperimentKind::kAdam:
    case ExperimentKind::kCreluAdam:
      return [lr](const ParamVector&, std::uint64_t) {
        return std::make_unique<Adam>(AdamConfig{.lr = lr});
      };
    case ExperimentKind::kTrac:
      return [lr, opt](const ParamVector& init, std::uint64_t) {
        return std::make_unique<TracOptimizer>(
            init, std::make_unique<Adam>(AdamConfig{.lr = lr}),
            trac_config_from(opt));
      };
    case ExperimentKind::kWarmstartTrac:
      return [lr, opt](const ParamVector&, std::uint64_t) {
        return std::make_unique<WarmstartOptimizer>(
            std::make_unique<Adam>(AdamConfig{.lr = lr}), opt.warm_steps,
            trac_config_from(opt), true);
      };
    case ExperimentKind::kWarmstartAdam:
      return [lr, opt](const ParamVector&, std::uint64_t) {
        return std::make_unique<WarmstartOptimizer>(
            std::make_unique<Adam>(AdamConfig{.lr = lr}), opt.warm_steps,
            trac_config_from(opt), false);
      };
    case ExperimentKind::kPrivilegedReset:
      return [lr, act, shared = config.shared_trunk](const ParamVector&,
                                                     std::uint64_t reinit_seed) {
        const ActorCritic ac = ActorCritic::make(4, 2, act, {64, 64}, shared);
        auto reinit = [ac](Rng& rng) { return ac.init(rng); };
        return std::make_unique<PrivilegedResetOptimizer>(
            std::make_unique<Adam>(AdamConfig{.lr = lr}), reinit, reinit_seed);
      };
    case ExperimentKind::kL2Sweep:
      return [lr, sweep_value](const ParamVector& init, std::uint64_t) {
        return std::make_unique<L2Init>(lr, sweep_value, init);
      };
    case ExperimentKind::kWeightDecaySweep:
      return [lr, sweep_value](const ParamVector&, std::uint64_t) {
        return std::make_unique<Adam>(
            AdamConfig{.lr = lr, .weight_decay = sweep_value});
      };
    default:
      throw std::logic_error("make_factory: not a training experiment");
  }
}

std::vector<RunRecord> run_seeds(const ExperimentConfig& config,
                                 const OptimizerFactory& factory,
                                 const fs::path& dir) {
  fs::create_directories(dir);
  const int n = static_cast<int>(config.seeds.size());
  std::vector<RunRecord> records(n);
  std::atomic<int> next{0};
  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));

  std::mutex error_mutex;
  std::string first_error;
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        const auto start = std::chrono::steady_clock::now();
        records[i] = lifelong_train(config.ppo, config.env,
                                    activation_for(config.experiment), factory,
                                    config.total_env_steps, config.seeds[i],
                                    config.shared_trunk);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        write_run_files(dir, config.seeds[i], records[i], wall);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (!first_error.empty()) {
    throw std::runtime_error("run failed: " + first_error);
  }
  return records;
}

void write_oco_csv(const fs::path& file, const QuadraticLossSeq& seq,
                   const RegretRecord& rec) {
  std::ofstream out(file);
  out << "# regret_to_date is measured against the best fixed comparator;\n";
  out << "# S = 0 when the optimizer has no scaling trace\n";
  out << "step,loss,regret_to_date,S\n";
  double played = 0.0;
  double comparator = 0.0;
  for (std::size_t t = 0; t < rec.losses.size(); ++t) {
    played += rec.losses[t];
    comparator += loss_and_grad(seq, static_cast<int>(t) + 1, rec.comparator).first;
    out << (t + 1) << ',' << fmt(rec.losses[t]) << ',' << fmt(played - comparator)
        << ',' << (rec.scaling.empty() ? "0" : fmt(rec.scaling[t])) << '\n';
  }
}

double stay_at_ref_loss(const QuadraticLossSeq& seq, const ParamVector& ref) {
  double total = 0.0;
  for (int t = 1; t <= seq.total_steps; ++t) {
    total += loss_and_grad(seq, t, ref).first;
  }
  return total;
}

void run_oco_bench(const ExperimentConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  const OcoOptions& o = config.oco;
  const int dim = 3;
  json summary;

  // stationary quadratic at two horizons: average regret must shrink
  for (int mult : {1, 2}) {
    const int T = o.stationary_horizon * mult;
    QuadraticLossSeq seq;
    seq.centers = {ParamVector(dim, o.center_scale)};
    seq.task_length = T;
    seq.total_steps = T;
    TracOptimizer trac_gd(ParamVector(dim, 0.0), std::make_unique<Sgd>(0.1));
    const RegretRecord rec = run_oco(trac_gd, seq, ParamVector(dim, 0.0));
    write_oco_csv(dir / ("stationary_T" + std::to_string(T) + ".csv"), seq, rec);
    summary["stationary_T" + std::to_string(T)] = {
        {"regret", rec.regret}, {"avg_regret", rec.regret / T}};
  }

  // piecewise stream whose best comparator is the reference point
  QuadraticLossSeq seq;
  for (int task = 0; task < o.num_tasks; ++task) {
    seq.centers.push_back(
        ParamVector(dim, task % 2 == 0 ? o.center_scale : -o.center_scale));
  }
  seq.task_length = o.task_length;
  seq.total_steps = o.task_length * o.num_tasks;

  TracOptimizer trac_gd(ParamVector(dim, 0.0), std::make_unique<Sgd>(o.gd_lr));
  const RegretRecord trac_rec = run_oco(trac_gd, seq, ParamVector(dim, 0.0));
  write_oco_csv(dir / "piecewise_trac.csv", seq, trac_rec);

  Sgd plain_gd(o.gd_lr);
  const RegretRecord gd_rec = run_oco(plain_gd, seq, ParamVector(dim, 0.0));
  write_oco_csv(dir / "piecewise_gd.csv", seq, gd_rec);

  const double ref_loss = stay_at_ref_loss(seq, ParamVector(dim, 0.0));
  summary["piecewise"] = {{"stay_at_ref_loss", ref_loss},
                          {"trac_gd_loss", trac_rec.cumulative_loss},
                          {"plain_gd_loss", gd_rec.cumulative_loss},
                          {"gd_lr", o.gd_lr}};
  std::ofstream out(dir / "oco_summary.json");
  out << summary.dump(2) << "\n";
}

void run_simplified(const ExperimentConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  SimplifiedOptions opts;
  opts.steps = static_cast<int>(std::min<std::int64_t>(config.total_env_steps, 100000));
  const SimplifiedReport report = run_simplified_equivalence(opts);
  json j;
  j["steps"] = opts.steps;
  j["max_identity_deviation"] = report.max_identity_deviation;
  j["max_discount_deviation"] = report.max_discount_deviation;
  j["min_abs_scaling"] = report.min_abs_scaling;
  j["final_scaling"] = report.final_scaling;
  std::ofstream out(dir / "simplified_summary.json");
  out << j.dump(2) << "\n";
}

std::string sweep_dir_name(const std::string& prefix, double value) {
  std::ostringstream ss;
  ss << prefix << value;
  return ss.str();
}

void write_best_lambda_table(const fs::path& sweep_dir,
                             const std::vector<double>& grid) {
  // per task: the lambda whose runs had the highest mean episode reward for
  // episodes starting in that task
  std::map<int, std::pair<double, double>> best;  // task -> (best reward, lambda)
  for (double lambda : grid) {
    const fs::path dir = sweep_dir / sweep_dir_name("lambda_", lambda);
    std::map<int, std::pair<double, int>> task_acc;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.find("_episodes.csv") == std::string::npos) continue;
      const CsvTable t = read_csv(entry.path());
      const int task_col = column_index(t, "start_task");
      const int reward_col = column_index(t, "reward");
      for (const auto& row : t.rows) {
        auto& acc = task_acc[static_cast<int>(row[task_col])];
        acc.first += row[reward_col];
        acc.second += 1;
      }
    }
    for (const auto& [task, acc] : task_acc) {
      const double mean = acc.first / acc.second;
      auto it = best.find(task);
      if (it == best.end() || mean > it->second.first) {
        best[task] = {mean, lambda};
      }
    }
  }
  std::ofstream out(sweep_dir / "best_lambda_per_task.csv");
  out << "# regularization strength with the highest mean episode reward per task\n";
  out << "task_index,best_lambda,mean_episode_reward\n";
  for (const auto& [task, entry] : best) {
    out << task << ',' << fmt(entry.second) << ',' << fmt(entry.first) << '\n';
  }
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const fs::path& out_root) {
  const fs::path dir = out_root / to_string(config.experiment);
  config.ppo.validate();

  switch (config.experiment) {
    case ExperimentKind::kOcoBench:
      run_oco_bench(config, dir);
      return {};
    case ExperimentKind::kSimplifiedEquivalence:
      run_simplified(config, dir);
      return {};
    case ExperimentKind::kL2Sweep: {
      fs::create_directories(dir);
      std::vector<RunRecord> all;
      for (double lambda : config.optimizer.lambda_grid) {
        const fs::path sub = dir / sweep_dir_name("lambda_", lambda);
        auto records = run_seeds(config, make_factory(config, lambda), sub);
        write_aggregate_files(sub);
        for (auto& r : records) all.push_back(std::move(r));
      }
      write_best_lambda_table(dir, config.optimizer.lambda_grid);
      return all;
    }
    case ExperimentKind::kWeightDecaySweep: {
      fs::create_directories(dir);
      std::vector<RunRecord> all;
      for (double wd : config.optimizer.weight_decay_grid) {
        const fs::path sub = dir / sweep_dir_name("wd_", wd);
        auto records = run_seeds(config, make_factory(config, wd), sub);
        write_aggregate_files(sub);
        for (auto& r : records) all.push_back(std::move(r));
      }
      return all;
    }
    default: {
      auto records = run_seeds(config, make_factory(config, 0.0), dir);
      write_aggregate_files(dir);
      return records;
    }
  }
}

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "reward_curve") return PlotKind::kRewardCurve;
  if (name == "scaling_trace") return PlotKind::kScalingTrace;
  if (name == "lambda_bars") return PlotKind::kLambdaBars;
  throw std::invalid_argument("unknown plot kind: " + name);
}

void emit_plot_data(const fs::path& experiment_dir, PlotKind kind,
                    const fs::path& out_file) {
  if (kind == PlotKind::kLambdaBars) {
    // one bar per sweep value: mean and std of the cumulative reward
    std::vector<std::pair<double, fs::path>> values;
    for (const auto& entry : fs::directory_iterator(experiment_dir)) {
      if (!entry.is_directory()) continue;
      const std::string name = entry.path().filename().string();
      const auto pos = name.find('_');
      if (pos == std::string::npos) continue;
      values.emplace_back(std::stod(name.substr(pos + 1)), entry.path());
    }
    if (values.empty()) {
      throw std::runtime_error("emit_plot_data: no sweep subdirectories in " +
                               experiment_dir.string());
    }
    std::sort(values.begin(), values.end());
    std::ofstream out(out_file);
    out << "# per sweep value: across-seed mean/std of cumulative mean episode reward\n";
    out << "value,mean_cumulative_reward,std_cumulative_reward\n";
    for (const auto& [value, dir] : values) {
      std::vector<RunSummary> summaries;
      for (const fs::path& f : list_run_summaries(dir)) {
        summaries.push_back(read_run_summary(f));
      }
      const AggregateSummary agg = aggregate(summaries);
      out << fmt(value) << ',' << fmt(agg.cumulative_reward_mean) << ','
          << fmt(agg.cumulative_reward_std) << '\n';
    }
    return;
  }

  // per-step/per-update series averaged across seeds
  const bool scaling = kind == PlotKind::kScalingTrace;
  const std::string suffix = scaling ? "_scaling.csv" : ".csv";
  std::vector<CsvTable> tables;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(experiment_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_seed", 0) != 0) continue;
    if (scaling) {
      if (name.find("_scaling.csv") == std::string::npos) continue;
    } else {
      if (name.find("_episodes.csv") != std::string::npos) continue;
      if (name.find("_scaling.csv") != std::string::npos) continue;
      if (name.find(".csv") == std::string::npos) continue;
    }
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) tables.push_back(read_csv(f));
  if (tables.empty()) {
    throw std::runtime_error("emit_plot_data: requested series not found in " +
                             experiment_dir.string());
  }

  const std::string x_col = scaling ? "opt_step" : "update";
  const std::string y_col = scaling ? "S" : "mean_episode_reward";
  std::size_t rows = tables.front().rows.size();
  for (const CsvTable& t : tables) rows = std::min(rows, t.rows.size());

  std::ofstream out(out_file);
  if (scaling) {
    out << "# across-seed scaling trace; one row per optimizer step\n";
    out << "step,mean_S,std_S\n";
  } else {
    out << "# across-seed reward curve; one row per optimizer update\n";
    out << "update,mean_reward,std_reward\n";
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (const CsvTable& t : tables) {
      mean += t.rows[r][column_index(t, y_col)];
    }
    mean /= tables.size();
    double var = 0.0;
    for (const CsvTable& t : tables) {
      const double v = t.rows[r][column_index(t, y_col)];
      var += (v - mean) * (v - mean);
    }
    const double std_dev =
        tables.size() > 1 ? std::sqrt(var / tables.size()) : 0.0;
    out << tables.front().rows[r][column_index(tables.front(), x_col)] << ','
        << fmt(mean) << ',' << fmt(std_dev) << '\n';
  }
}

void write_comparison(const fs::path& out_root, const std::string& baseline_experiment) {
  const fs::path baseline_dir = out_root / baseline_experiment;
  if (!fs::exists(baseline_dir)) {
    throw std::runtime_error("baseline experiment not found: " +
                             baseline_dir.string());
  }
  std::vector<RunSummary> baseline;
  for (const fs::path& f : list_run_summaries(baseline_dir)) {
    baseline.push_back(read_run_summary(f));
  }
  const AggregateSummary base_agg = aggregate(baseline);

  std::vector<fs::path> experiment_dirs;
  for (const auto& entry : fs::directory_iterator(out_root)) {
    if (entry.is_directory() && !list_run_summaries(entry.path()).empty()) {
      experiment_dirs.push_back(entry.path());
    }
  }
  std::sort(experiment_dirs.begin(), experiment_dirs.end());

  std::ofstream out(out_root / "comparison.csv");
  out << "# normalized improvement of A over B is (R_A - R_B) / |R_B|, where R is the\n";
  out << "# across-seed mean of the per-run cumulative sum of mean episode reward\n";
  out << "experiment,runs,cumulative_reward_mean,cumulative_reward_std,"
         "normalized_improvement_vs_" << baseline_experiment << "\n";
  for (const fs::path& dir : experiment_dirs) {
    std::vector<RunSummary> summaries;
    for (const fs::path& f : list_run_summaries(dir)) {
      summaries.push_back(read_run_summary(f));
    }
    const AggregateSummary agg = aggregate(summaries);
    out << dir.filename().string() << ',' << agg.runs << ','
        << fmt(agg.cumulative_reward_mean) << ',' << fmt(agg.cumulative_reward_std)
        << ',' << fmt(normalized_improvement(agg.cumulative_reward_mean,
                                             base_agg.cumulative_reward_mean))
        << '\n';
  }
}

}  // namespace trac
