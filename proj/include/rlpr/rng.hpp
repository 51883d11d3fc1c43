#pragma once

#include <cstdint>
#include <random>

namespace rlpr {

/// Independent random streams keyed by (run seed, subsystem, index).
enum class Stream : std::uint32_t {
  Setup = 0,
  Mobility = 1,
  Mac = 2,
  Protocol = 3,
  Traffic = 4,
};

/// Deterministic generator for one (seed, stream, index) triple. Draw
/// conversion is done here rather than via <random> distributions so that
/// sequences do not depend on the standard library implementation.
class SeededGenerator {
 public:
  SeededGenerator(std::uint64_t seed, Stream stream, std::uint32_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive well-separated stream seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace rlpr
