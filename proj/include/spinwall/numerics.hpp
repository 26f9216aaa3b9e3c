#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace spinwall {

// Fixed-tree pairwise summation. The reduction tree depends only on the index
// layout, so results are bit-identical for a given term vector no matter how
// the terms were produced.
inline double pairwise_sum(std::span<const double> terms) {
  const std::size_t n = terms.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = terms[0];
    for (std::size_t i = 1; i < n; ++i) s += terms[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

// Wrap an angle into [-pi, pi). -pi is included, +pi maps to -pi.
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double w = std::remainder(a, two_pi);  // (-pi, pi]
  if (w >= M_PI) w -= two_pi;
  return w;
}

// xoshiro256** with splitmix64 seeding. Hand-rolled so that streams are
// reproducible across platforms and standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t state_[4] = {};
};

}  // namespace spinwall
