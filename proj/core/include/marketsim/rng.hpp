#pragma once

#include <cstdint>
#include <string_view>

namespace marketsim {

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr uint64_t fnv1a(std::string_view s, uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based random stream: draw n is a pure function of (seed, key, n).
/// Every simulated entity owns its own stream, so adding an entity never
/// shifts another entity's draws.
class RngStream {
 public:
  RngStream() = default;
  RngStream(uint64_t master_seed, std::string_view key)
      : key_(splitmix64(master_seed ^ splitmix64(fnv1a(key)))) {}
  RngStream(uint64_t master_seed, std::string_view key, uint64_t sub)
      : key_(splitmix64(master_seed ^ splitmix64(fnv1a(key) ^ splitmix64(sub)))) {}

  uint64_t at(uint64_t counter) const { return splitmix64(key_ + splitmix64(counter)); }

  uint64_t next_u64() { return at(counter_++); }

  /// Uniform integer in [lo, hi], rejection-sampled (no modulo bias).
  int64_t uniform(int64_t lo, int64_t hi) {
    if (hi <= lo) return lo;
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<int64_t>(next_u64());
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int64_t>(x % span);
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_{0};
  uint64_t counter_{0};
};

}  // namespace marketsim
