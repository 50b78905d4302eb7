#pragma once

#include <utility>
#include <vector>

#include "trac/optimizer.hpp"

namespace trac {

// Piecewise-stationary quadratic loss stream: l_t(x) = 0.5 ||x - c_t||^2
// with the center held constant for task_length rounds at a time.
struct QuadraticLossSeq {
  std::vector<ParamVector> centers;  // one per task
  int task_length = 1;
  int total_steps = 0;

  // Center active in round t (1-based, 1 <= t <= total_steps).
  const ParamVector& center_at(int t) const;
};

// (loss, gradient) of round t's loss at x. Throws std::out_of_range on t.
std::pair<double, ParamVector> loss_and_grad(const QuadraticLossSeq& seq, int t,
                                             const ParamVector& x);

// Minimizer of sum_t l_t(u); for quadratics, the time-average of the centers.
ParamVector best_fixed_comparator(const QuadraticLossSeq& seq);

// sum_t l_t(x_t) - sum_t l_t(u)
double static_regret(const std::vector<ParamVector>& iterates,
                     const QuadraticLossSeq& seq, const ParamVector& u);

struct RegretRecord {
  std::vector<ParamVector> iterates;      // x_1 .. x_T
  std::vector<double> losses;             // l_t(x_t)
  std::vector<double> scaling;            // S per round (empty unless traced)
  double cumulative_loss = 0.0;
  ParamVector comparator;
  double regret = 0.0;
};

// Plays the optimizer against the loss stream from x_1 = x_init, computing
// regret against the best fixed comparator.
RegretRecord run_oco(Optimizer& algorithm, const QuadraticLossSeq& seq,
                     const ParamVector& x_init);

}  // namespace trac
