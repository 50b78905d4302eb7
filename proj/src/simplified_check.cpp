#include "trac/simplified_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trac/rng.hpp"
#include "trac/trac.hpp"

namespace trac {

SimplifiedReport run_simplified_equivalence(const SimplifiedOptions& opts) {
  Rng rng(opts.seed);
  std::vector<double> theta_ref(opts.dim);
  for (double& v : theta_ref) v = rng.uniform(-1.0, 1.0);

  SimplifiedTrac st(theta_ref, opts.eta, opts.beta, opts.alpha, opts.s_init);
  std::vector<double> theta = theta_ref;

  SimplifiedReport report;
  report.min_abs_scaling = std::abs(st.scaling());
  const double matched_discount = opts.beta;  // lambda chosen so 1 - lambda*eta = beta

  for (int t = 0; t < opts.steps; ++t) {
    std::vector<double> grad(opts.dim);
    for (double& g : grad) g = rng.uniform(-1.0, 1.0);

    const double s_prev = st.scaling();
    std::vector<double> offset_prev(opts.dim);
    for (int i = 0; i < opts.dim; ++i) offset_prev[i] = theta[i] - theta_ref[i];

    const std::vector<double> theta_next = st.step(theta, grad);
    const double h = st.last_h();
    const double s_next = st.scaling();

    // closed form: theta' - ref = (beta - alpha h / S)(theta - ref) - eta S' g
    const double effective_discount = opts.beta - opts.alpha * h / s_prev;
    for (int i = 0; i < opts.dim; ++i) {
      const double lhs = theta_next[i] - theta_ref[i];
      const double rhs = effective_discount * offset_prev[i] - opts.eta * s_next * grad[i];
      const double denom = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      report.max_identity_deviation =
          std::max(report.max_identity_deviation, std::abs(lhs - rhs) / denom);
    }
    report.max_discount_deviation =
        std::max(report.max_discount_deviation,
                 std::abs(effective_discount - matched_discount));
    report.min_abs_scaling = std::min(report.min_abs_scaling, std::abs(s_next));
    theta = theta_next;
  }
  report.final_scaling = st.scaling();
  return report;
}

}  // namespace trac
