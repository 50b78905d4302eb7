#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trac/rng.hpp"

namespace trac {

using Observation = std::array<double, 4>;

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int step_in_episode = 0;
};

struct StepResult {
  Observation observation;  // raw state (offsets applied by the caller)
  double reward = 1.0;
  bool done = false;
  bool truncated = false;  // done by the episode cap rather than failure
};

// Standard cart-pole physics: force +/-10 N, gravity 9.8, cart mass 1.0,
// pole mass 0.1, half-length 0.5, explicit Euler with tau = 0.02 s.
// Episode ends when |x| > 2.4, |theta| > 12 degrees, or after 400 steps.
class CartPole {
 public:
  static constexpr int kEpisodeCap = 400;

  Observation reset(Rng& rng);

  // action in {0, 1}. Throws std::logic_error if the episode already ended.
  StepResult step(int action);

  const CartPoleState& state() const { return state_; }
  bool done() const { return done_; }

 private:
  CartPoleState state_;
  bool done_ = true;  // must reset before stepping
};

struct ShiftOptions {
  int period = 200;           // environment steps per task
  double offset_range = 2.0;  // observation offsets drawn per dimension
  bool signed_offsets = true; // uniform on [-range, range]; else [0, range]
};

// Lifelong distribution-shift wrapper state: per-dimension observation
// offsets held constant within a task and resampled every `period` global
// environment steps.
class ShiftSchedule {
 public:
  ShiftSchedule(ShiftOptions opts, std::uint64_t seed);

  // Call once per environment step. Returns true when a task boundary was
  // crossed (offsets resampled, task index incremented).
  bool advance();

  const Observation& offsets() const { return offsets_; }
  int task_index() const { return task_index_; }
  std::int64_t global_step() const { return global_step_; }
  const ShiftOptions& options() const { return opts_; }

  Observation perturb(const Observation& raw) const {
    return {raw[0] + offsets_[0], raw[1] + offsets_[1], raw[2] + offsets_[2],
            raw[3] + offsets_[3]};
  }

 private:
  ShiftOptions opts_;
  Rng rng_;
  Observation offsets_{0.0, 0.0, 0.0, 0.0};  // task 0 runs unperturbed
  std::int64_t global_step_ = 0;
  int task_index_ = 0;
};

}  // namespace trac
