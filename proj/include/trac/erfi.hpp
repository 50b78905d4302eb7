#pragma once

namespace trac {

// erfi grows like exp(x^2) and overflows doubles near x ~ 26.6; arguments are
// saturated at +/- kErfiClampBound before evaluation. Saturation is monotone
// and sign-preserving.
inline constexpr double kErfiClampBound = 6.0;

struct ErfiDomain {
  double clamp_bound = kErfiClampBound;
};

// Imaginary error function erfi(x) = (2/sqrt(pi)) * sum_k x^(2k+1) / (k! (2k+1)),
// evaluated by its Maclaurin series (all terms share the sign of x, so the
// summation is cancellation-free). Relative accuracy <= 1e-12 on [-6, 6].
// Throws std::invalid_argument on non-finite input.
double erfi(double x, const ErfiDomain& domain);
double erfi(double x);

// erfi(x) / erfi(1/sqrt(2)), with the denominator cached.
double erfi_norm(double x);

// erfi(1/sqrt(2)), the normalization constant of the tuner decision rule.
double erfi_inv_sqrt2();

}  // namespace trac
