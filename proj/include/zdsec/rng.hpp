#pragma once

#include <cstdint>
#include <string_view>

namespace zdsec {

// splitmix64 finalizer; the core mixer for all seeded randomness here.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Counter-based generator: out_i = splitmix64(key + i), with
// key = splitmix64(splitmix64(seed) ^ fnv1a64(stream)). Independent streams
// are derived by label, so parallel consumers never share state and any draw
// is reproducible from (seed, stream, counter).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream)
      : key_(splitmix64(splitmix64(seed) ^ fnv1a64(stream))) {}

  std::uint64_t next_u64() { return splitmix64(key_ + counter_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + next_double() * (hi - lo);
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n).
  int below(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  static constexpr const char* kGeneratorId = "splitmix64-counter-v1";

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace zdsec
