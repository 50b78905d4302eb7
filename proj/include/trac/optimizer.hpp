#pragma once

#include <cstdint>
#include <vector>

#include "trac/rng.hpp"

namespace trac {

using ParamVector = std::vector<double>;

class TracOptimizer;

// First-order optimizer contract: a stateful update rule mapping
// (params, grad) -> new params of the same dimension.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual ParamVector step(const ParamVector& params, const ParamVector& grad) = 0;

  // Reinitializes internal state around the given parameters (moment
  // accumulators cleared, reference points moved). Used by the privileged
  // reset wrapper.
  virtual void reset(const ParamVector& params) { (void)params; }

  // Task-boundary hook. Returns true if the optimizer replaced the
  // parameters (privileged wrappers only).
  virtual bool on_task_boundary(ParamVector& params) {
    (void)params;
    return false;
  }

  // Non-null when a scaling trace is available (the meta-optimizer, possibly
  // behind a wrapper).
  virtual const TracOptimizer* as_trac() const { return nullptr; }
};

// params - lr * grad
ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double lr);

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double lr);
  ParamVector step(const ParamVector& params, const ParamVector& grad) override;
  double lr() const { return lr_; }

 private:
  double lr_;
};

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: applied directly to params
};

// Bias-corrected Adam with optional decoupled weight decay:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   params' = params - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * params
class Adam final : public Optimizer {
 public:
  explicit Adam(const AdamConfig& cfg);
  ParamVector step(const ParamVector& params, const ParamVector& grad) override;
  void reset(const ParamVector& params) override;

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return t_; }

 private:
  AdamConfig cfg_;
  ParamVector m_;
  ParamVector v_;
  std::int64_t t_ = 0;
};

// Gradient descent with an L2 pull toward a reference point:
//   params' = params - lr * (grad + lambda * (params - theta_ref))
class L2Init final : public Optimizer {
 public:
  L2Init(double lr, double lambda, ParamVector theta_ref);
  ParamVector step(const ParamVector& params, const ParamVector& grad) override;
  void reset(const ParamVector& params) override;

  const ParamVector& theta_ref() const { return theta_ref_; }

 private:
  double lr_;
  double lambda_;
  ParamVector theta_ref_;
};

ParamVector l2_init_step(const ParamVector& params, const ParamVector& grad,
                         double lr, double lambda, const ParamVector& theta_ref);

}  // namespace trac
