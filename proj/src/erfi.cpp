#include "trac/erfi.hpp"

#include <cmath>
#include <stdexcept>

namespace trac {

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955125738961589031;
constexpr int kMaxTerms = 200;

double erfi_series(double x) {
  // sum_k x^(2k+1) / (k! (2k+1)); term_k+1 = term_k * x^2 / (k+1) adjusted by
  // the (2k+1) denominator applied at accumulation time.
  const double xx = x * x;
  double power = x;  // x^(2k+1) / k!
  double sum = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double term = power / (2 * k + 1);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    power *= xx / (k + 1);
  }
  return kTwoOverSqrtPi * sum;
}

}  // namespace

double erfi(double x, const ErfiDomain& domain) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("erfi: non-finite argument");
  }
  if (x > domain.clamp_bound) x = domain.clamp_bound;
  if (x < -domain.clamp_bound) x = -domain.clamp_bound;
  return erfi_series(x);
}

double erfi(double x) { return erfi(x, ErfiDomain{}); }

double erfi_inv_sqrt2() {
  static const double value = erfi_series(1.0 / std::sqrt(2.0));
  return value;
}

double erfi_norm(double x) { return erfi(x) / erfi_inv_sqrt2(); }

}  // namespace trac
