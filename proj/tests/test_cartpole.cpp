#include "trac/cartpole.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"

namespace {

// Independent integration of the same ODE in long double.
struct OracleState {
  long double x, x_dot, theta, theta_dot;
};

OracleState oracle_step(OracleState s, int action) {
  const long double g = 9.8L, mc = 1.0L, mp = 0.1L, len = 0.5L, tau = 0.02L;
  const long double total = mc + mp;
  const long double pml = mp * len;
  const long double force = action == 1 ? 10.0L : -10.0L;
  const long double ct = std::cos(s.theta), st = std::sin(s.theta);
  const long double temp = (force + pml * s.theta_dot * s.theta_dot * st) / total;
  const long double theta_acc =
      (g * st - ct * temp) / (len * (4.0L / 3.0L - mp * ct * ct / total));
  const long double x_acc = temp - pml * theta_acc * ct / total;
  return {s.x + tau * s.x_dot, s.x_dot + tau * x_acc, s.theta + tau * s.theta_dot,
          s.theta_dot + tau * theta_acc};
}

}  // namespace

TEST_CASE("reset draws uniform state in [-0.05, 0.05] and is reproducible") {
  trac::CartPole env;
  trac::Rng a(123), b(123);
  const trac::Observation oa = env.reset(a);
  trac::CartPole env2;
  const trac::Observation ob = env2.reset(b);
  CHECK(oa == ob);
  for (double v : oa) {
    CHECK(v >= -0.05);
    CHECK(v <= 0.05);
  }
}

TEST_CASE("physics matches the independent integrator") {
  trac::CartPole env;
  trac::Rng rng(7);
  env.reset(rng);
  OracleState s{env.state().x, env.state().x_dot, env.state().theta,
                env.state().theta_dot};
  trac::Rng action_rng(8);
  for (int i = 0; i < 200 && !env.done(); ++i) {
    const int action = static_cast<int>(action_rng.uniform_int(2));
    s = oracle_step(s, action);
    const trac::StepResult res = env.step(action);
    CHECK(std::abs(res.observation[0] - static_cast<double>(s.x)) <= 1e-10);
    CHECK(std::abs(res.observation[1] - static_cast<double>(s.x_dot)) <= 1e-10);
    CHECK(std::abs(res.observation[2] - static_cast<double>(s.theta)) <= 1e-10);
    CHECK(std::abs(res.observation[3] - static_cast<double>(s.theta_dot)) <= 1e-10);
  }
}

TEST_CASE("termination on angle and reward of the terminating step") {
  trac::CartPole env;
  trac::Rng rng(3);
  env.reset(rng);
  // drive the pole over with a constant push
  trac::StepResult res;
  int steps = 0;
  do {
    res = env.step(1);
    ++steps;
    CHECK(res.reward == 1.0);  // +1 every step including the terminating one
  } while (!res.done && steps < 400);
  CHECK(res.done);
  CHECK_FALSE(res.truncated);  // angle failure, not the cap
  CHECK(std::abs(env.state().theta) > 12.0 * 2.0 * M_PI / 360.0);
  CHECK_THROWS_AS(env.step(1), std::logic_error);
}

TEST_CASE("episode cap at 400 steps flags truncation") {
  trac::CartPole env;
  trac::Rng rng(11);
  env.reset(rng);
  int len = 0;
  trac::StepResult res;
  do {
    // lean-following feedback keeps the pole balanced to the cap
    const auto& s = env.state();
    const int action = s.theta + 0.3 * s.theta_dot > 0.0 ? 1 : 0;
    res = env.step(action);
    ++len;
  } while (!res.done);
  CHECK(len == 400);
  CHECK(res.truncated);
  CHECK(res.reward == 1.0);
}

TEST_CASE("schedule resamples exactly on period multiples") {
  trac::ShiftSchedule sched({.period = 200, .offset_range = 2.0}, 42);
  CHECK(sched.task_index() == 0);
  CHECK(sched.offsets() == trac::Observation{0.0, 0.0, 0.0, 0.0});

  for (int step = 1; step <= 199; ++step) {
    CHECK_FALSE(sched.advance());
  }
  CHECK(sched.task_index() == 0);
  CHECK(sched.advance());  // step 200
  CHECK(sched.task_index() == 1);
  for (double o : sched.offsets()) {
    CHECK(o >= -2.0);
    CHECK(o <= 2.0);
  }

  // 1000 total steps -> 5 resamples
  trac::ShiftSchedule sched2({.period = 200, .offset_range = 2.0}, 42);
  int boundaries = 0;
  for (int step = 0; step < 1000; ++step) {
    if (sched2.advance()) ++boundaries;
  }
  CHECK(boundaries == 5);
  CHECK(sched2.task_index() == 5);
}

TEST_CASE("offsets are piecewise constant and bounded") {
  trac::ShiftSchedule sched({.period = 50, .offset_range = 2.0}, 9);
  trac::Observation task_offsets = sched.offsets();
  for (int step = 1; step <= 500; ++step) {
    const bool boundary = sched.advance();
    if (boundary) {
      task_offsets = sched.offsets();
    } else {
      CHECK(sched.offsets() == task_offsets);
    }
    for (double o : sched.offsets()) {
      CHECK(std::abs(o) <= 2.0);
    }
  }
}

TEST_CASE("unsigned offset option draws from [0, range]") {
  trac::ShiftSchedule sched({.period = 10, .offset_range = 2.0, .signed_offsets = false},
                            5);
  for (int step = 1; step <= 100; ++step) sched.advance();
  for (double o : sched.offsets()) {
    CHECK(o >= 0.0);
    CHECK(o <= 2.0);
  }
}

TEST_CASE("perturb adds the current offsets") {
  trac::ShiftSchedule sched({.period = 1, .offset_range = 2.0}, 4);
  sched.advance();
  const trac::Observation raw{0.1, 0.2, 0.3, 0.4};
  const trac::Observation obs = sched.perturb(raw);
  for (int i = 0; i < 4; ++i) {
    CHECK(obs[i] == raw[i] + sched.offsets()[i]);
  }
}

TEST_CASE("full determinism under fixed seeds and actions") {
  auto run = [] {
    trac::CartPole env;
    trac::Rng env_rng(21);
    trac::ShiftSchedule sched({.period = 37, .offset_range = 2.0}, 22);
    std::vector<double> trace;
    trac::Observation raw = env.reset(env_rng);
    for (int step = 0; step < 600; ++step) {
      const trac::Observation obs = sched.perturb(raw);
      trace.insert(trace.end(), obs.begin(), obs.end());
      const trac::StepResult res = env.step(step % 2);
      sched.advance();
      raw = res.done ? env.reset(env_rng) : res.observation;
    }
    return trace;
  };
  CHECK(run() == run());
}
