#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace churn {

// splitmix64 (Steele, Lea, Flood) used for seeding.
inline std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman, Vigna). Chosen over std distributions because its
// output stream is fully specified, so logs regenerate bit-identically on any
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto &w : state_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Deterministic per-stream child generator.
  Rng fork(std::uint64_t stream) const {
    std::uint64_t sm = state_[0] ^ (stream * 0x9e3779b97f4a7c15ull + 0x1234567ull);
    return Rng(splitmix64(sm));
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive range; the modulo bias is < 2^-32 for the spans used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  double gaussian(double mean, double stddev) {
    // Box-Muller; both uniforms are always drawn so the stream stays aligned
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }

  double truncated_gaussian(double mean, double stddev, double lo, double hi) {
    for (int i = 0; i < 64; ++i) {
      double v = gaussian(mean, stddev);
      if (v >= lo && v <= hi) return v;
    }
    return mean;
  }

  double exponential(double mean) {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return -mean * std::log(u);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  static constexpr const char *kName = "xoshiro256++ / splitmix64 seeding";

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace churn
