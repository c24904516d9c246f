#pragma once

#include <cstdint>
#include <random>

namespace uljam {

/// splitmix64 finalizer, used for deriving per-cell sweep seeds.
inline uint64_t splitmix64(uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic RNG wrapper. std::mt19937_64 has a fully specified
// algorithm, so streams are reproducible across platforms; the standard
// distributions are not, which is why bounded draws are done by hand.
class Rng
{
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform draw in [0, bound) via rejection sampling; bound > 0.
  uint64_t next_below(uint64_t bound)
  {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of entropy.
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 gen_;
};

} // namespace uljam
