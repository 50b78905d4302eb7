#include "trac/tuner.hpp"

#include <cmath>
#include <stdexcept>

#include "trac/erfi.hpp"

namespace trac {

DiscountedTuner::DiscountedTuner(double beta, double eps, bool clamp_at_zero)
    : beta_(beta), eps_(eps), clamp_at_zero_(clamp_at_zero) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("DiscountedTuner: beta must be in (0, 1]");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("DiscountedTuner: eps must be positive");
  }
}

double DiscountedTuner::step(double h) {
  if (!std::isfinite(h)) {
    throw std::invalid_argument("DiscountedTuner: non-finite input");
  }
  v_ = beta_ * beta_ * v_ + h * h;
  sigma_ = beta_ * sigma_ - h;
  ++t_;
  double s = eps_ / erfi_inv_sqrt2() * erfi(sigma_ / (std::sqrt(2.0 * v_) + eps_));
  if (clamp_at_zero_ && s < 0.0) s = 0.0;
  return s;
}

}  // namespace trac
