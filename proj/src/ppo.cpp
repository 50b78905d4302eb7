#include "trac/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace trac {

void PpoConfig::validate() const {
  if (steps_per_update < 1 || minibatch_size < 1 || epochs_per_update < 1) {
    throw std::invalid_argument("PpoConfig: sizes must be positive");
  }
  if (steps_per_update % minibatch_size != 0) {
    throw std::invalid_argument(
        "PpoConfig: steps_per_update must be divisible by minibatch_size");
  }
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) {
    throw std::invalid_argument("PpoConfig: clip_eps must be in (0, 1)");
  }
}

ActorCritic ActorCritic::make(int obs_dim, int num_actions, Activation activation,
                              const std::vector<int>& hidden, bool shared_trunk) {
  ActorCritic ac;
  ac.num_actions = num_actions;
  ac.shared_trunk = shared_trunk;
  ac.policy.layer_sizes.push_back(obs_dim);
  for (int h : hidden) ac.policy.layer_sizes.push_back(h);
  ac.policy.layer_sizes.push_back(shared_trunk ? num_actions + 1 : num_actions);
  ac.policy.activation = activation;
  if (!shared_trunk) {
    ac.value.layer_sizes.push_back(obs_dim);
    for (int h : hidden) ac.value.layer_sizes.push_back(h);
    ac.value.layer_sizes.push_back(1);
    ac.value.activation = activation;
  }
  ac.policy_param_count = ac.policy.param_count();
  return ac;
}

ParamVector ActorCritic::init(Rng& rng) const {
  ParamVector params = init_params(policy, rng);
  if (!shared_trunk) {
    const ParamVector vp = init_params(value, rng);
    params.insert(params.end(), vp.begin(), vp.end());
  }
  return params;
}

namespace {

ParamVector slice(const ParamVector& params, std::size_t begin, std::size_t count) {
  return ParamVector(params.begin() + begin, params.begin() + begin + count);
}

}  // namespace

std::vector<double> ActorCritic::policy_logits(const ParamVector& params,
                                               const std::vector<double>& obs) const {
  std::vector<double> out = forward(policy, shared_trunk ? params
                                                         : slice(params, 0,
                                                                 policy_param_count),
                                    obs);
  if (shared_trunk) out.resize(num_actions);
  return out;
}

double ActorCritic::value_estimate(const ParamVector& params,
                                   const std::vector<double>& obs) const {
  if (shared_trunk) {
    return forward(policy, params, obs)[num_actions];
  }
  return forward(value, slice(params, policy_param_count, value.param_count()),
                 obs)[0];
}

LifelongEnv::LifelongEnv(ShiftOptions opts, std::uint64_t env_seed,
                         std::uint64_t schedule_seed)
    : schedule_(opts, schedule_seed), env_rng_(env_seed) {
  raw_ = env_.reset(env_rng_);
}

double LifelongEnv::bootstrap_value(const ActorCritic& ac,
                                    const ParamVector& params) const {
  const Observation obs = schedule_.perturb(raw_);
  return ac.value_estimate(params, {obs.begin(), obs.end()});
}

void LifelongEnv::collect_step(const ActorCritic& ac, ParamVector& params,
                               Rng& action_rng, Optimizer* boundary_listener,
                               RolloutBatch& batch) {
  const Observation perturbed = schedule_.perturb(raw_);
  std::vector<double> obs(perturbed.begin(), perturbed.end());

  const std::vector<double> logits = ac.policy_logits(params, obs);
  const std::vector<double> logp = log_softmax(logits);
  const std::vector<double> probs = softmax(logits);
  const int action = categorical_sample(probs, action_rng);
  const double v = ac.value_estimate(params, obs);

  const StepResult res = env_.step(action);
  episode_reward_ += res.reward;
  ++episode_length_;

  const bool boundary = schedule_.advance();
  if (boundary && boundary_listener != nullptr) {
    boundary_listener->on_task_boundary(params);
  }

  batch.observations.push_back(std::move(obs));
  batch.actions.push_back(action);
  batch.behavior_log_probs.push_back(logp[action]);
  batch.values.push_back(v);
  batch.rewards.push_back(res.reward);
  batch.dones.push_back(res.done ? 1 : 0);
  batch.truncations.push_back(res.truncated ? 1 : 0);
  double terminal_value = 0.0;
  if (res.truncated) {
    const Observation term = schedule_.perturb(res.observation);
    terminal_value = ac.value_estimate(params, {term.begin(), term.end()});
  }
  batch.terminal_values.push_back(terminal_value);

  if (res.done) {
    episodes_.push_back({episode_start_step_, episode_start_task_,
                         episode_length_, episode_reward_});
    episode_reward_ = 0.0;
    episode_length_ = 0;
    episode_start_step_ = schedule_.global_step();
    episode_start_task_ = schedule_.task_index();
    raw_ = env_.reset(env_rng_);
  } else {
    raw_ = res.observation;
  }
}

RolloutBatch collect_rollout(LifelongEnv& env, const ActorCritic& ac,
                             ParamVector& params, const PpoConfig& cfg,
                             Rng& action_rng, Optimizer* boundary_listener) {
  RolloutBatch batch;
  batch.observations.reserve(cfg.steps_per_update);
  for (int t = 0; t < cfg.steps_per_update; ++t) {
    env.collect_step(ac, params, action_rng, boundary_listener, batch);
  }
  batch.final_bootstrap =
      batch.dones.back() ? 0.0 : env.bootstrap_value(ac, params);
  return batch;
}

void compute_advantages(RolloutBatch& batch, double gamma, double gae_lambda) {
  const int n = batch.size();
  batch.advantages.assign(n, 0.0);
  batch.returns.assign(n, 0.0);
  double carry = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    double next_value;
    if (batch.dones[t]) {
      next_value = batch.truncations[t] ? batch.terminal_values[t] : 0.0;
      carry = 0.0;
    } else {
      next_value = t == n - 1 ? batch.final_bootstrap : batch.values[t + 1];
    }
    const double delta = batch.rewards[t] + gamma * next_value - batch.values[t];
    carry = delta + gamma * gae_lambda * (batch.dones[t] ? 0.0 : 1.0) * carry;
    batch.advantages[t] = carry;
    batch.returns[t] = carry + batch.values[t];
  }
}

void normalize_advantages(std::vector<double>& adv) {
  if (adv.empty()) return;
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / adv.size());
  for (double& a : adv) a = (a - mean) / (std + 1e-8);
}

PpoLossParts ppo_loss_and_grad(const ParamVector& params, const ActorCritic& ac,
                               const RolloutBatch& batch,
                               const std::vector<double>& norm_advantages,
                               const std::vector<int>& minibatch,
                               const PpoConfig& cfg, ParamVector& grad_out) {
  const std::size_t policy_count = ac.policy_param_count;
  const ParamVector policy_params =
      ac.shared_trunk ? params : slice(params, 0, policy_count);
  const ParamVector value_params =
      ac.shared_trunk ? ParamVector{}
                      : slice(params, policy_count, ac.value.param_count());
  grad_out.assign(params.size(), 0.0);

  const double m = static_cast<double>(minibatch.size());
  PpoLossParts parts;
  double entropy_sum = 0.0;

  ForwardCache pcache;
  ForwardCache vcache;
  for (int i : minibatch) {
    const std::vector<double>& obs = batch.observations[i];
    const std::vector<double>& out =
        forward_cached(ac.policy, policy_params, obs, pcache);
    std::vector<double> logits(out.begin(),
                               ac.shared_trunk ? out.end() - 1 : out.end());
    const std::vector<double> logp = log_softmax(logits);
    const std::vector<double> probs = softmax(logits);
    const int a = batch.actions[i];
    const double rho = std::exp(logp[a] - batch.behavior_log_probs[i]);
    const double adv = norm_advantages[i];

    const double unclipped = rho * adv;
    const double clipped =
        std::clamp(rho, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * adv;
    parts.policy += -std::min(unclipped, clipped) / m;

    const double entropy = categorical_entropy(probs);
    entropy_sum += entropy;

    // gradient through the policy logits
    const double pg_coef = unclipped <= clipped ? -adv * rho / m : 0.0;
    std::vector<double> dlogits(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
      const double onehot = static_cast<int>(k) == a ? 1.0 : 0.0;
      double d = pg_coef * (onehot - probs[k]);
      if (probs[k] > 0.0) {
        d += cfg.entropy_coeff / m * probs[k] * (std::log(probs[k]) + entropy);
      }
      dlogits[k] = d;
    }

    if (ac.shared_trunk) {
      const double v = out.back();
      const double verr = v - batch.returns[i];
      parts.value += cfg.value_coeff * verr * verr / m;
      dlogits.push_back(2.0 * cfg.value_coeff * verr / m);
      backward_into(ac.policy, policy_params, pcache, dlogits, grad_out.data());
    } else {
      backward_into(ac.policy, policy_params, pcache, dlogits, grad_out.data());
      const double v = forward_cached(ac.value, value_params, obs, vcache)[0];
      const double verr = v - batch.returns[i];
      parts.value += cfg.value_coeff * verr * verr / m;
      const std::vector<double> dv = {2.0 * cfg.value_coeff * verr / m};
      backward_into(ac.value, value_params, vcache, dv,
                    grad_out.data() + policy_count);
    }
  }

  parts.entropy_bonus = -cfg.entropy_coeff * entropy_sum / m;
  parts.total = parts.policy + parts.value + parts.entropy_bonus;

  if (!std::isfinite(parts.total)) {
    std::string which = !std::isfinite(parts.policy)    ? "policy surrogate"
                        : !std::isfinite(parts.value)   ? "value error"
                                                        : "entropy bonus";
    throw std::runtime_error("ppo_loss_and_grad: non-finite loss in " + which +
                             " term");
  }
  return parts;
}

double train_update(ParamVector& params, Optimizer& optimizer,
                    const ActorCritic& ac, RolloutBatch& batch,
                    const PpoConfig& cfg, Rng& shuffle_rng,
                    std::int64_t* opt_step_counter,
                    std::vector<ScalingRow>* scaling_sink) {
  compute_advantages(batch, cfg.gamma, cfg.gae_lambda);
  std::vector<double> adv = batch.advantages;
  if (cfg.advantage_norm == AdvNorm::kPerUpdate) normalize_advantages(adv);

  std::vector<int> order(batch.size());
  std::iota(order.begin(), order.end(), 0);

  const int per_epoch = batch.size() / cfg.minibatch_size;
  ParamVector grad;
  double loss_sum = 0.0;
  int steps = 0;
  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    shuffle_rng.shuffle(order);
    for (int b = 0; b < per_epoch; ++b) {
      const std::vector<int> minibatch(
          order.begin() + static_cast<std::size_t>(b) * cfg.minibatch_size,
          order.begin() + static_cast<std::size_t>(b + 1) * cfg.minibatch_size);
      std::vector<double> local_adv;
      const std::vector<double>* use_adv = &adv;
      if (cfg.advantage_norm == AdvNorm::kPerMinibatch) {
        // renormalize within the minibatch only; indices stay batch-global
        local_adv = adv;
        std::vector<double> values;
        values.reserve(minibatch.size());
        for (int i : minibatch) values.push_back(adv[i]);
        normalize_advantages(values);
        for (std::size_t k = 0; k < minibatch.size(); ++k) {
          local_adv[minibatch[k]] = values[k];
        }
        use_adv = &local_adv;
      }
      const PpoLossParts parts =
          ppo_loss_and_grad(params, ac, batch, *use_adv, minibatch, cfg, grad);
      params = optimizer.step(params, grad);
      loss_sum += parts.total;
      ++steps;
      if (opt_step_counter != nullptr) ++*opt_step_counter;
      if (scaling_sink != nullptr) {
        if (const TracOptimizer* t = optimizer.as_trac()) {
          scaling_sink->push_back({opt_step_counter ? *opt_step_counter : steps,
                                   t->scaling(), t->tuner_outputs()});
        }
      }
    }
  }
  return loss_sum / steps;
}

SeedBundle SeedBundle::from_master(std::uint64_t master) {
  return {derive_seed(master, "init"),    derive_seed(master, "env"),
          derive_seed(master, "schedule"), derive_seed(master, "action"),
          derive_seed(master, "shuffle"), derive_seed(master, "reinit")};
}

RunRecord lifelong_train(const PpoConfig& cfg, const ShiftOptions& shift,
                         Activation activation, const OptimizerFactory& make_opt,
                         std::int64_t total_env_steps, std::uint64_t master_seed,
                         bool shared_trunk) {
  cfg.validate();
  if (total_env_steps < cfg.steps_per_update) {
    throw std::invalid_argument(
        "lifelong_train: total_env_steps must cover at least one update");
  }

  const SeedBundle seeds = SeedBundle::from_master(master_seed);
  const ActorCritic ac = ActorCritic::make(4, 2, activation, {64, 64}, shared_trunk);
  Rng init_rng(seeds.init);
  ParamVector params = ac.init(init_rng);

  std::unique_ptr<Optimizer> optimizer = make_opt(params, seeds.reinit);

  LifelongEnv env(shift, seeds.env, seeds.schedule);
  Rng action_rng(seeds.action);
  Rng shuffle_rng(seeds.shuffle);

  RunRecord record;
  record.summary.seed = master_seed;
  std::int64_t opt_steps = 0;
  const int num_updates = static_cast<int>(total_env_steps / cfg.steps_per_update);

  std::size_t episodes_seen = 0;
  for (int update = 0; update < num_updates; ++update) {
    RolloutBatch batch =
        collect_rollout(env, ac, params, cfg, action_rng, optimizer.get());
    const std::size_t scaling_rows_before = record.scaling.size();
    const double mean_loss =
        train_update(params, *optimizer, ac, batch, cfg, shuffle_rng,
                     &opt_steps, &record.scaling);

    UpdateRow row;
    row.update = update;
    row.global_step = env.schedule().global_step();
    row.task_index = env.schedule().task_index();
    row.mean_loss = mean_loss;
    double reward_sum = 0.0;
    int n_eps = 0;
    for (std::size_t e = episodes_seen; e < env.episodes().size(); ++e) {
      reward_sum += env.episodes()[e].reward;
      ++n_eps;
    }
    episodes_seen = env.episodes().size();
    row.episodes_completed = n_eps;
    row.mean_episode_reward = n_eps > 0 ? reward_sum / n_eps : 0.0;

    if (const TracOptimizer* t = optimizer->as_trac()) {
      const std::size_t appended = record.scaling.size() - scaling_rows_before;
      if (appended > 0) {
        double s_sum = 0.0;
        for (std::size_t k = scaling_rows_before; k < record.scaling.size(); ++k) {
          s_sum += record.scaling[k].scaling;
        }
        row.mean_scaling = s_sum / appended;
        row.has_scaling = true;
      }
      row.final_scaling = t->scaling();
    }
    record.updates.push_back(row);
  }

  record.episodes = env.episodes();

  // summary
  RunSummary& s = record.summary;
  for (const UpdateRow& row : record.updates) {
    s.cumulative_mean_episode_reward += row.mean_episode_reward;
  }
  double post_sum = 0.0;
  int post_n = 0;
  for (const EpisodeRecord& ep : record.episodes) {
    if (ep.start_step >= shift.period) {
      post_sum += ep.reward;
      ++post_n;
    }
  }
  s.post_first_shift_mean_reward = post_n > 0 ? post_sum / post_n : 0.0;
  s.task_count = env.schedule().task_index() + 1;

  std::map<int, std::pair<double, int>> per_task;
  for (const UpdateRow& row : record.updates) {
    if (row.has_scaling) {
      auto& acc = per_task[row.task_index];
      acc.first += row.mean_scaling;
      acc.second += 1;
    }
  }
  for (const auto& [task, acc] : per_task) {
    s.mean_scaling_per_task[task] = acc.first / acc.second;
  }
  return record;
}

}  // namespace trac
