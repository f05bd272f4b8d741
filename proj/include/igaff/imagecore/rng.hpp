#pragma once

#include <cstdint>
#include <random>

namespace igaff {

/// SplitMix64 finalizer. Used to derive substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream.
///
/// Draws come from std::mt19937_64, whose output sequence is fixed by the
/// standard. Floating-point draws are built from the top 53 bits directly so
/// they do not depend on the library's distribution implementation.
/// A substream is a fresh stream whose seed is a hash of (seed, label); it
/// does not consume draws from the parent.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RngStream substream(std::uint64_t label) const {
    return RngStream(derive_seed(seed_, label));
  }

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
    return mix64(seed ^ mix64(label ^ 0xA5A5A5A5DEADBEEFULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi]; requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace igaff
