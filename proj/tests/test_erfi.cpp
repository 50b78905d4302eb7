#include "trac/erfi.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"

namespace {

// Independent oracle: Maclaurin series in extended precision, fixed 250
// terms (far past convergence on [-6, 6]).
long double erfi_oracle(long double x) {
  const long double two_over_sqrt_pi =
      1.128379167095512573896158903121545172L;
  const long double xx = x * x;
  long double power = x;
  long double sum = 0.0L;
  for (int k = 0; k < 250; ++k) {
    sum += power / (2 * k + 1);
    power *= xx / (k + 1);
  }
  return two_over_sqrt_pi * sum;
}

}  // namespace

TEST_CASE("erfi at zero and odd symmetry") {
  CHECK(trac::erfi(0.0) == 0.0);
  CHECK(trac::erfi(0.3) == doctest::Approx(-trac::erfi(-0.3)).epsilon(1e-15));
  CHECK(trac::erfi(0.3) ==
        doctest::Approx(0.34894933875893618).epsilon(1e-13));
}

TEST_CASE("erfi matches frozen oracle values") {
  // values computed with the extended-precision series oracle
  CHECK(trac::erfi(1.0) ==
        doctest::Approx(1.6504257587975428760).epsilon(1e-13));
  CHECK(trac::erfi(1.0 / std::sqrt(2.0)) ==
        doctest::Approx(0.95343826925126083909).epsilon(1e-13));
  CHECK(trac::erfi_inv_sqrt2() ==
        doctest::Approx(0.95343826925126083909).epsilon(1e-13));
  CHECK(trac::erfi(6.0) ==
        doctest::Approx(4.1127514558282387097e14).epsilon(1e-12));
}

TEST_CASE("erfi oracle agreement on a 1000-point grid") {
  for (int i = 0; i < 1000; ++i) {
    const double x = -6.0 + 12.0 * i / 999.0;
    const double got = trac::erfi(x);
    const double want = static_cast<double>(erfi_oracle(x));
    const double denom = std::max(1.0, std::abs(want));
    CHECK(std::abs(got - want) / denom <= 1e-12);
  }
}

TEST_CASE("erfi oddness and monotonicity on the grid") {
  double prev = trac::erfi(-6.0);
  for (int i = 1; i < 500; ++i) {
    const double x = -6.0 + 12.0 * i / 499.0;
    const double v = trac::erfi(x);
    CHECK(v > prev);
    CHECK(std::abs(trac::erfi(-x) + v) <= 1e-14 * std::max(1.0, std::abs(v)));
    prev = v;
  }
}

TEST_CASE("erfi saturates beyond the clamp bound") {
  const double at_bound = trac::erfi(trac::kErfiClampBound);
  CHECK(std::isfinite(at_bound));
  CHECK(trac::erfi(7.5) == at_bound);
  CHECK(trac::erfi(1e6) == at_bound);
  CHECK(trac::erfi(-1e6) == -at_bound);

  trac::ErfiDomain narrow{2.0};
  CHECK(trac::erfi(3.0, narrow) == trac::erfi(2.0, narrow));
}

TEST_CASE("erfi rejects non-finite input") {
  CHECK_THROWS_AS(trac::erfi(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(trac::erfi(std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("erfi_norm basics") {
  CHECK(trac::erfi_norm(0.0) == 0.0);
  CHECK(trac::erfi_norm(1.0 / std::sqrt(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  // ratio of the two frozen oracle values
  CHECK(trac::erfi_norm(1.0) ==
        doctest::Approx(1.7310252923806271181).epsilon(1e-13));
}
