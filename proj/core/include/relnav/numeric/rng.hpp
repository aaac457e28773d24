#pragma once

#include <cstdint>
#include <string_view>

namespace relnav::numeric {

// Splittable counter-based generator (splitmix64 core). All sampling in the
// project flows through this type so that runs are bit-reproducible across
// platforms; std::random distributions are implementation-defined and never
// used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kGolden)) {}

  // Independent stream derived from this generator's seed and a label.
  // Forking does not advance the parent state.
  Rng fork(std::uint64_t stream) const { return Rng(state_ ^ mix(stream + kGolden)); }
  Rng fork(std::string_view label) const { return fork(fnv1a(label)); }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (deterministic, no cached spare).
  double normal();

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  static std::uint64_t fnv1a(std::string_view s);

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace relnav::numeric
