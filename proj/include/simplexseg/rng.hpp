#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace simplexseg {

/// SplitMix64 generator (Steele, Lea, Vigna). Fixed algorithm so that
/// identically seeded streams are bit-reproducible across platforms and
/// language ports; std::mt19937 + distributions would not give that.
class Splitmix64 {
 public:
  explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform double in [-half_width, +half_width).
  double uniform_symmetric(double half_width) {
    return half_width * (2.0 * uniform() - 1.0);
  }

  /// Uniform integer in [0, bound). Modulo bias is < bound/2^64; irrelevant
  /// for shuffling and in any case deterministic.
  std::uint64_t bounded(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

/// Standard normal draws via the basic Box-Muller transform over a
/// Splitmix64 stream. One transform yields two deviates; the second is
/// cached, so the draw order is part of the documented stream contract.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform_pos();
    const double u2 = rng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  Splitmix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by the fixed PRNG (std::shuffle's draw
/// sequence is implementation-defined, which would break reproducibility).
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Splitmix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace simplexseg
