#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace ticketforge {

uint64_t splitmix64(uint64_t& state);

// xoshiro256** with a Box-Muller gaussian. Standard-library distributions are
// implementation-defined, so every stochastic choice in the project goes
// through this generator to keep runs reproducible across compilers.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // [0, 1), 53-bit resolution.
  double uniform();

  double normal(double mu = 0.0, double sigma = 1.0);

  // Uniform integer in [lo, hi], inclusive; rejection sampled.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int64_t i = static_cast<int64_t>(v.size()) - 1; i > 0; --i) {
      const int64_t j = uniform_int(0, i);
      std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
    }
  }

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stable sub-stream derivation: hashes (tag, index) into the base seed so that
// e.g. per-epoch shuffles and per-replicate weight draws never collide.
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0);

}  // namespace ticketforge
