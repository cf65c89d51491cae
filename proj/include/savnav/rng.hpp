#pragma once
// Seeded deterministic RNG. Every stochastic draw in the project goes through
// this so runs are bit-reproducible across platforms and worker counts
// (std:: distributions are implementation-defined, so we roll our own).

#include <cmath>
#include <cstdint>
#include <string_view>

namespace savnav {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Mixes two seeds into the seed of an independent derived stream.
inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
  return splitmix64(s);
}
inline std::uint64_t seed_mix(std::uint64_t a, std::string_view tag) {
  return seed_mix(a, fnv1a64(tag));
}
inline std::uint64_t seed_mix(std::uint64_t a, std::string_view tag, std::uint64_t b) {
  return seed_mix(seed_mix(a, tag), b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Lemire reduction, no modulo bias to speak of.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
  }

  /// Uniform integer in [lo, hi] inclusive.
  int int_in(int lo, int hi) {
    return lo + static_cast<int>(uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double normal(double mu = 0.0, double sigma = 1.0) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Derived independent stream; advances this stream by one draw.
  Rng fork(std::string_view tag) { return Rng(seed_mix(next_u64(), tag)); }

 private:
  std::uint64_t state_;
};

}  // namespace savnav
