#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "trac/optimizer.hpp"
#include "trac/tuner.hpp"

namespace trac {

// Which offset the tuner input h_t = <g_t, offset> is taken against.
// MetaOffset uses theta_t - theta_ref (the meta iterate); BaseOffset uses
// theta_base_t - theta_ref and exists for ablation.
enum class HMode { kMetaOffset, kBaseOffset };

inline const std::vector<double> kDefaultBetaGrid = {0.9,    0.99,    0.999,
                                                     0.9999, 0.99999, 0.999999};

struct TracConfig {
  std::vector<double> betas = kDefaultBetaGrid;
  double eps = 1e-8;
  double s_floor = 1e-8;  // additive floor so S_1 = 1e-8 breaks the h_1 = 0 fixed point
  HMode h_mode = HMode::kMetaOffset;
  bool tuner_clamp_at_zero = false;
};

// Meta-optimizer wrapping a base optimizer: direction from the base,
// magnitude from a bank of discounted tuners aggregated additively.
//
// Per step, with incoming gradient g at meta iterate theta:
//   theta_base <- Base(theta_base, g)
//   h = <g, theta - theta_ref>            (or base offset per h_mode)
//   S = s_floor + sum_j tuner_j(h)
//   theta' = theta_ref + (theta_base - theta_ref) * S
class TracOptimizer final : public Optimizer {
 public:
  TracOptimizer(ParamVector theta_ref, std::unique_ptr<Optimizer> base,
                TracConfig cfg = {});

  ParamVector step(const ParamVector& params, const ParamVector& grad) override;
  void reset(const ParamVector& params) override;
  const TracOptimizer* as_trac() const override { return this; }

  double scaling() const { return scaling_; }
  const std::vector<double>& tuner_outputs() const { return tuner_outputs_; }
  const ParamVector& theta_ref() const { return theta_ref_; }
  const ParamVector& theta_base() const { return theta_base_; }
  double last_h() const { return last_h_; }
  std::size_t tuner_count() const { return tuners_.size(); }

 private:
  TracConfig cfg_;
  ParamVector theta_ref_;
  ParamVector theta_base_;
  std::unique_ptr<Optimizer> base_;
  std::vector<DiscountedTuner> tuners_;
  std::vector<double> tuner_outputs_;
  double scaling_;
  double last_h_ = 0.0;
};

// The single-tuner simplification where the erfi rule is replaced by the
// linear recursion S' = beta * S - alpha * h, with a gradient-descent base.
// Satisfies, whenever S != 0:
//   theta' - theta_ref = (beta - alpha h / S) (theta - theta_ref) - eta S' g
class SimplifiedTrac {
 public:
  SimplifiedTrac(ParamVector theta_ref, double eta, double beta, double alpha,
                 double s_init);

  // Throws std::domain_error when the current S is exactly 0.
  ParamVector step(const ParamVector& theta, const ParamVector& grad);

  double scaling() const { return scaling_; }
  double last_h() const { return last_h_; }
  const ParamVector& theta_ref() const { return theta_ref_; }
  const ParamVector& theta_base() const { return theta_base_; }

 private:
  ParamVector theta_ref_;
  ParamVector theta_base_;
  double eta_;
  double beta_;
  double alpha_;
  double scaling_;
  double last_h_ = 0.0;
};

// Runs the wrapped base alone for warm_steps steps, then re-anchors: the
// meta-optimizer is created with theta_ref set to the base's current iterate
// and takes over from there. With engage_trac = false the wrapper is an
// identity shim around the base (the warmstarted-baseline configuration).
class WarmstartOptimizer final : public Optimizer {
 public:
  WarmstartOptimizer(std::unique_ptr<Optimizer> base, int warm_steps,
                     TracConfig cfg = {}, bool engage_trac = true);

  ParamVector step(const ParamVector& params, const ParamVector& grad) override;
  const TracOptimizer* as_trac() const override;

  bool engaged() const { return engaged_; }
  const ParamVector& theta_ref() const;

 private:
  std::unique_ptr<Optimizer> base_;   // empty once moved into trac_
  std::unique_ptr<TracOptimizer> trac_;
  TracConfig cfg_;
  int warm_steps_;
  int steps_taken_ = 0;
  bool engage_trac_;
  bool engaged_ = false;
  ParamVector theta_ref_;
};

// Privileged weight-resetting baseline: told when task boundaries occur, it
// redraws the parameters from the initializer and clears the inner
// optimizer's state.
class PrivilegedResetOptimizer final : public Optimizer {
 public:
  using Reinit = std::function<ParamVector(Rng&)>;

  PrivilegedResetOptimizer(std::unique_ptr<Optimizer> inner, Reinit reinit,
                           std::uint64_t reinit_seed);

  ParamVector step(const ParamVector& params, const ParamVector& grad) override;
  bool on_task_boundary(ParamVector& params) override;
  const TracOptimizer* as_trac() const override { return inner_->as_trac(); }

  int resets() const { return resets_; }

 private:
  std::unique_ptr<Optimizer> inner_;
  Reinit reinit_;
  Rng rng_;
  int resets_ = 0;
};

}  // namespace trac
