#include "rlpr/rng.hpp"

namespace rlpr {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

SeededGenerator::SeededGenerator(std::uint64_t seed, Stream stream, std::uint32_t index)
    : seed_(seed),
      engine_(mix64(mix64(seed) ^ mix64((static_cast<std::uint64_t>(stream) << 32) | index))) {}

std::uint64_t SeededGenerator::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

}  // namespace rlpr
