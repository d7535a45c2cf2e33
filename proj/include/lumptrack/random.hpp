#pragma once

#include <cmath>
#include <cstdint>

namespace lumptrack {

namespace detail {
// splitmix64 finalizer (Vigna). Used both as the stream generator and to
// mix substream identifiers into seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-seeded random stream. Every consumer derives its own stream from
/// (seed, substream ids), so draws are reproducible bit-for-bit regardless of
/// evaluation order; the filter derives one stream per (step, particle).
class RandomStream {
 public:
  RandomStream() : RandomStream(0) {}
  explicit RandomStream(std::uint64_t seed) : state_(detail::mix64(seed ^ 0x6c62272e07bb0142ULL)) {}

  static RandomStream derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
    std::uint64_t s = detail::mix64(seed ^ 0x2545f4914f6cdd1dULL);
    s = detail::mix64(s ^ a);
    s = detail::mix64(s ^ (b * 0xd6e8feb86659fd93ULL));
    s = detail::mix64(s ^ (c * 0xa0761d6478bd642fULL));
    RandomStream r;
    r.state_ = s;
    r.has_cached_gaussian_ = false;
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (has_cached_gaussian_) {
      has_cached_gaussian_ = false;
      return cached_gaussian_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_gaussian_ = r * std::sin(theta);
    has_cached_gaussian_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  /// Poisson count by inversion of the exponential race; fine for small rates.
  int poisson(double rate) {
    if (rate <= 0.0) return 0;
    const double limit = std::exp(-rate);
    int count = 0;
    double product = 1.0;
    for (;;) {
      product *= uniform();
      if (product <= limit) return count;
      ++count;
    }
  }

  /// Gamma(k) for integer shape as a sum of exponentials.
  double gamma_integer(int shape) {
    double acc = 0.0;
    for (int i = 0; i < shape; ++i) {
      double u = 0.0;
      do {
        u = uniform();
      } while (u <= 0.0);
      acc -= std::log(u);
    }
    return acc;
  }

  /// Beta(a, b) for integer shapes via the two-gamma ratio.
  double beta_integer(int a, int b) {
    const double x = gamma_integer(a);
    const double y = gamma_integer(b);
    return x / (x + y);
  }

 private:
  std::uint64_t state_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace lumptrack
