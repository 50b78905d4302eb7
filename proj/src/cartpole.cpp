#include "trac/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace trac {

namespace {

constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kTau = 0.02;
constexpr double kXThreshold = 2.4;
const double kThetaThreshold = 12.0 * 2.0 * M_PI / 360.0;

}  // namespace

Observation CartPole::reset(Rng& rng) {
  state_.x = rng.uniform(-0.05, 0.05);
  state_.x_dot = rng.uniform(-0.05, 0.05);
  state_.theta = rng.uniform(-0.05, 0.05);
  state_.theta_dot = rng.uniform(-0.05, 0.05);
  state_.step_in_episode = 0;
  done_ = false;
  return {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
}

StepResult CartPole::step(int action) {
  if (done_) {
    throw std::logic_error("CartPole: step() on a finished episode");
  }
  if (action != 0 && action != 1) {
    throw std::invalid_argument("CartPole: action must be 0 or 1");
  }

  const double force = action == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(state_.theta);
  const double sin_t = std::sin(state_.theta);
  const double temp =
      (force + kPoleMassLength * state_.theta_dot * state_.theta_dot * sin_t) /
      kTotalMass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

  state_.x += kTau * state_.x_dot;
  state_.x_dot += kTau * x_acc;
  state_.theta += kTau * state_.theta_dot;
  state_.theta_dot += kTau * theta_acc;
  ++state_.step_in_episode;

  StepResult out;
  out.observation = {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
  out.reward = 1.0;
  const bool failed = std::abs(state_.x) > kXThreshold ||
                      std::abs(state_.theta) > kThetaThreshold;
  out.truncated = !failed && state_.step_in_episode >= kEpisodeCap;
  out.done = failed || out.truncated;
  done_ = out.done;
  return out;
}

ShiftSchedule::ShiftSchedule(ShiftOptions opts, std::uint64_t seed)
    : opts_(opts), rng_(seed) {
  if (opts_.period < 1) {
    throw std::invalid_argument("ShiftSchedule: period must be >= 1");
  }
  if (!(opts_.offset_range >= 0.0)) {
    throw std::invalid_argument("ShiftSchedule: offset_range must be >= 0");
  }
}

bool ShiftSchedule::advance() {
  ++global_step_;
  if (global_step_ % opts_.period != 0) return false;
  const double lo = opts_.signed_offsets ? -opts_.offset_range : 0.0;
  for (double& o : offsets_) o = rng_.uniform(lo, opts_.offset_range);
  ++task_index_;
  return true;
}

}  // namespace trac
