#pragma once

#include <cstdint>

namespace trac {

// One-dimensional discounted parameter-free tuner. Maps a scalar input
// stream h_t to scaling outputs via the erfi decision rule:
//
//   v_t     = beta^2 v_{t-1} + h_t^2
//   sigma_t = beta sigma_{t-1} - h_t
//   s_{t+1} = eps / erfi(1/sqrt(2)) * erfi( sigma_t / (sqrt(2 v_t) + eps) )
//
// Outputs may be negative; sign(s_{t+1}) = sign(sigma_t). An optional
// clamp-at-zero flag (off by default) floors the output at 0 for ablations.
class DiscountedTuner {
 public:
  // Requires beta in (0, 1] and eps > 0; throws std::invalid_argument.
  explicit DiscountedTuner(double beta, double eps = 1e-8,
                           bool clamp_at_zero = false);

  // Consumes one input h (must be finite) and returns s_{t+1}.
  double step(double h);

  double beta() const { return beta_; }
  double eps() const { return eps_; }
  double variance() const { return v_; }
  double negative_sum() const { return sigma_; }
  std::int64_t step_count() const { return t_; }

 private:
  double beta_;
  double eps_;
  bool clamp_at_zero_;
  double v_ = 0.0;
  double sigma_ = 0.0;
  std::int64_t t_ = 0;
};

}  // namespace trac
