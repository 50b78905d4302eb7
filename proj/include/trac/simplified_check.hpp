#pragma once

#include <cstdint>

namespace trac {

struct SimplifiedOptions {
  int steps = 1000;
  int dim = 3;
  double eta = 0.1;
  double beta = 1.0;
  double alpha = 1e-3;
  double s_init = 1.0;
  std::uint64_t seed = 7;
};

struct SimplifiedReport {
  // worst per-coordinate relative deviation between the played iterate and
  // the closed-form recursion over the whole stream
  double max_identity_deviation = 0.0;
  double min_abs_scaling = 0.0;
  // worst deviation of the effective discount (beta - alpha h / S) from the
  // matched L2 discount 1 - lambda eta, with lambda chosen so they coincide
  double max_discount_deviation = 0.0;
  double final_scaling = 0.0;
};

// Plays a random gradient stream through the simplified meta-optimizer and
// evaluates both sides of its update recursion, plus the correspondence with
// L2-regularized gradient descent under matched discounting.
SimplifiedReport run_simplified_equivalence(const SimplifiedOptions& opts);

}  // namespace trac
