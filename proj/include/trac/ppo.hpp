#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "trac/cartpole.hpp"
#include "trac/mlp.hpp"
#include "trac/optimizer.hpp"
#include "trac/trac.hpp"

namespace trac {

enum class AdvNorm { kNone, kPerUpdate, kPerMinibatch };

struct PpoConfig {
  int steps_per_update = 800;  // two 400-step episodes
  int minibatch_size = 32;
  int epochs_per_update = 5;
  double clip_eps = 0.2;
  double value_coeff = 0.5;
  double entropy_coeff = 0.01;
  double base_lr = 0.01;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  AdvNorm advantage_norm = AdvNorm::kPerUpdate;

  void validate() const;
};

// Policy and value networks in one flat parameter vector, so a single
// optimizer instance governs both. Two layouts:
//   separate (default): two towers, parameters concatenated
//   shared trunk: one tower with num_actions + 1 outputs, the last output
//   being the value estimate
struct ActorCritic {
  MlpSpec policy;
  MlpSpec value;  // unused in shared-trunk mode
  std::size_t policy_param_count = 0;
  int num_actions = 0;
  bool shared_trunk = false;

  static ActorCritic make(int obs_dim, int num_actions, Activation activation,
                          const std::vector<int>& hidden = {64, 64},
                          bool shared_trunk = false);

  std::size_t param_count() const {
    return shared_trunk ? policy.param_count()
                        : policy_param_count + value.param_count();
  }
  ParamVector init(Rng& rng) const;

  std::vector<double> policy_logits(const ParamVector& params,
                                    const std::vector<double>& obs) const;
  double value_estimate(const ParamVector& params,
                        const std::vector<double>& obs) const;
};

struct RolloutBatch {
  std::vector<std::vector<double>> observations;
  std::vector<int> actions;
  std::vector<double> behavior_log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;
  std::vector<std::uint8_t> truncations;   // ended by the episode cap
  std::vector<double> terminal_values;     // V(s_terminal) for truncated steps
  double final_bootstrap = 0.0;            // V of the next obs if window ends mid-episode

  std::vector<double> advantages;  // raw GAE, filled by compute_advantages
  std::vector<double> returns;     // advantages + values

  int size() const { return static_cast<int>(rewards.size()); }
};

struct EpisodeRecord {
  std::int64_t start_step = 0;  // global env step at which the episode began
  int start_task = 0;
  int length = 0;
  double reward = 0.0;
};

// Environment + schedule + episode bookkeeping for one lifelong run.
class LifelongEnv {
 public:
  LifelongEnv(ShiftOptions opts, std::uint64_t env_seed, std::uint64_t schedule_seed);

  const ShiftSchedule& schedule() const { return schedule_; }
  const std::vector<EpisodeRecord>& episodes() const { return episodes_; }

  // One environment transition under the policy in `params`. Appends to the
  // rollout arrays; fires the optimizer's task-boundary hook (which may
  // replace `params`).
  void collect_step(const ActorCritic& ac, ParamVector& params, Rng& action_rng,
                    Optimizer* boundary_listener, RolloutBatch& batch);

  double bootstrap_value(const ActorCritic& ac, const ParamVector& params) const;

 private:
  CartPole env_;
  ShiftSchedule schedule_;
  Rng env_rng_;
  Observation raw_{};
  double episode_reward_ = 0.0;
  int episode_length_ = 0;
  std::int64_t episode_start_step_ = 0;
  int episode_start_task_ = 0;
  std::vector<EpisodeRecord> episodes_;
};

// Exactly cfg.steps_per_update transitions, resetting episodes in-window and
// advancing the shift schedule every step.
RolloutBatch collect_rollout(LifelongEnv& env, const ActorCritic& ac,
                             ParamVector& params, const PpoConfig& cfg,
                             Rng& action_rng, Optimizer* boundary_listener);

// Generalized advantage estimation, truncated at episode boundaries. Failure
// terminals bootstrap 0; cap-truncated episodes bootstrap V(s_terminal).
void compute_advantages(RolloutBatch& batch, double gamma, double gae_lambda);

// In-place (a - mean) / (std + 1e-8) over the given advantage vector.
void normalize_advantages(std::vector<double>& adv);

struct PpoLossParts {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy_bonus = 0.0;  // already carries its negative sign
};

// Clipped-surrogate PPO loss and its exact gradient over the concatenated
// policy+value parameters:
//   loss = -mean(min(rho A, clip(rho) A)) + c_v mean((V - ret)^2) - c_e mean(H)
PpoLossParts ppo_loss_and_grad(const ParamVector& params, const ActorCritic& ac,
                               const RolloutBatch& batch,
                               const std::vector<double>& norm_advantages,
                               const std::vector<int>& minibatch,
                               const PpoConfig& cfg, ParamVector& grad_out);

struct ScalingRow {
  std::int64_t opt_step = 0;
  double scaling = 0.0;
  std::vector<double> tuner_outputs;
};

struct UpdateRow {
  int update = 0;
  std::int64_t global_step = 0;
  int task_index = 0;
  int episodes_completed = 0;
  double mean_episode_reward = 0.0;
  bool has_scaling = false;
  double mean_scaling = 0.0;  // 0 when the optimizer has no scaling trace
  double final_scaling = 0.0;
  double mean_loss = 0.0;
};

struct RunSummary {
  double cumulative_mean_episode_reward = 0.0;  // sum of per-update means
  double post_first_shift_mean_reward = 0.0;
  std::map<int, double> mean_scaling_per_task;
  int task_count = 0;
  std::uint64_t seed = 0;
};

struct RunRecord {
  std::vector<UpdateRow> updates;
  std::vector<EpisodeRecord> episodes;
  std::vector<ScalingRow> scaling;
  RunSummary summary;
};

// Shuffled-minibatch PPO epochs; each minibatch gradient is one optimizer
// step. Appends scaling rows when the optimizer exposes a trace. Returns the
// mean loss over the update.
double train_update(ParamVector& params, Optimizer& optimizer,
                    const ActorCritic& ac, RolloutBatch& batch,
                    const PpoConfig& cfg, Rng& shuffle_rng,
                    std::int64_t* opt_step_counter,
                    std::vector<ScalingRow>* scaling_sink);

struct SeedBundle {
  std::uint64_t init;
  std::uint64_t env;
  std::uint64_t schedule;
  std::uint64_t action;
  std::uint64_t shuffle;
  std::uint64_t reinit;

  // Streams derived by hashing (master, stream name): adding streams never
  // perturbs existing ones.
  static SeedBundle from_master(std::uint64_t master);
};

using OptimizerFactory =
    std::function<std::unique_ptr<Optimizer>(const ParamVector& init_params,
                                             std::uint64_t reinit_seed)>;

// Alternating collect/update loop over the shifting environment.
RunRecord lifelong_train(const PpoConfig& cfg, const ShiftOptions& shift,
                         Activation activation, const OptimizerFactory& make_opt,
                         std::int64_t total_env_steps, std::uint64_t master_seed,
                         bool shared_trunk = false);

}  // namespace trac
