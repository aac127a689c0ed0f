#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace artic {

/// Deterministic PRNG (splitmix64 core). Distribution helpers are written out
/// explicitly so that streams are bit-identical across platforms and standard
/// library versions for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Derive an independent stream, e.g. one per view or per trial.
  Rng fork(std::uint64_t stream_id) const {
    return Rng(state_ ^ (0x9e3779b97f4a7c15ull * (stream_id + 0x632be59bd9b4e019ull)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  int index(int n) { return int(below(std::uint64_t(n))); }

  /// Standard normal via Box-Muller (always consumes two uniforms).
  double normal();

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline double Rng::normal() {
  // Polar form would consume a variable number of draws; keep it fixed.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace artic
