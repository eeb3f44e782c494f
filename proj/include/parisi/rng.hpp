#pragma once

#include <cmath>
#include <cstdint>

namespace parisi {

/// splitmix64 finalizer; the building block of the counter-based streams below.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a stream key from a seed and up to three integer labels.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ a);
  k = mix64(k ^ (b + 0x632be59bd9b4e019ULL));
  return mix64(k ^ (c + 0x85157af5d2cd6a4fULL));
}

/// Counter-based stream: the i-th draw depends only on (key, i), so any entry can
/// be regenerated independently of the order in which draws are requested.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t bits(std::uint64_t i) const noexcept { return mix64(key_ ^ mix64(i)); }

  /// Uniform in (0, 1), never 0.
  double uniform(std::uint64_t i) const noexcept { return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal from draws 2i and 2i+1 (Box-Muller, cosine branch).
  double normal(std::uint64_t i) const noexcept {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace parisi
