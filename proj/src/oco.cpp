#include "trac/oco.hpp"

#include <stdexcept>

#include "trac/trac.hpp"

namespace trac {

const ParamVector& QuadraticLossSeq::center_at(int t) const {
  if (t < 1 || t > total_steps) {
    throw std::out_of_range("QuadraticLossSeq: round index out of range");
  }
  const std::size_t task = static_cast<std::size_t>((t - 1) / task_length);
  return centers.at(task < centers.size() ? task : centers.size() - 1);
}

std::pair<double, ParamVector> loss_and_grad(const QuadraticLossSeq& seq, int t,
                                             const ParamVector& x) {
  const ParamVector& c = seq.center_at(t);
  if (c.size() != x.size()) {
    throw std::invalid_argument("loss_and_grad: dimension mismatch");
  }
  double loss = 0.0;
  ParamVector grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    grad[i] = x[i] - c[i];
    loss += 0.5 * grad[i] * grad[i];
  }
  return {loss, std::move(grad)};
}

ParamVector best_fixed_comparator(const QuadraticLossSeq& seq) {
  if (seq.total_steps < 1 || seq.centers.empty()) {
    throw std::invalid_argument("best_fixed_comparator: empty sequence");
  }
  ParamVector mean(seq.centers.front().size(), 0.0);
  for (int t = 1; t <= seq.total_steps; ++t) {
    const ParamVector& c = seq.center_at(t);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += c[i];
  }
  for (double& m : mean) m /= seq.total_steps;
  return mean;
}

double static_regret(const std::vector<ParamVector>& iterates,
                     const QuadraticLossSeq& seq, const ParamVector& u) {
  if (static_cast<int>(iterates.size()) != seq.total_steps) {
    throw std::invalid_argument("static_regret: iterate count != total_steps");
  }
  double played = 0.0;
  double comparator = 0.0;
  for (int t = 1; t <= seq.total_steps; ++t) {
    played += loss_and_grad(seq, t, iterates[t - 1]).first;
    comparator += loss_and_grad(seq, t, u).first;
  }
  return played - comparator;
}

RegretRecord run_oco(Optimizer& algorithm, const QuadraticLossSeq& seq,
                     const ParamVector& x_init) {
  RegretRecord rec;
  rec.iterates.reserve(seq.total_steps);
  rec.losses.reserve(seq.total_steps);
  const bool traced = algorithm.as_trac() != nullptr;

  ParamVector x = x_init;
  for (int t = 1; t <= seq.total_steps; ++t) {
    auto [loss, grad] = loss_and_grad(seq, t, x);
    rec.iterates.push_back(x);
    rec.losses.push_back(loss);
    rec.cumulative_loss += loss;
    x = algorithm.step(x, grad);
    if (traced) rec.scaling.push_back(algorithm.as_trac()->scaling());
  }

  rec.comparator = best_fixed_comparator(seq);
  rec.regret = static_regret(rec.iterates, seq, rec.comparator);
  return rec;
}

}  // namespace trac
