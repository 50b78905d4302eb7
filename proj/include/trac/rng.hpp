#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace trac {

// Deterministic RNG used everywhere randomness is needed. All draws go
// through hand-rolled uniform helpers so that a given seed produces the
// same stream on every platform (std:: distributions are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform double in [0, 1)
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Derives a per-stream seed from a master seed and a stream name, so adding
// a new stream never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

}  // namespace trac
