#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace fbtrack {

/// Counter-based generator: output i is a bijective mix of (key + i * golden gamma).
/// This is SplitMix64 viewed as a counter mode; substreams are distinct keys.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

  constexpr std::uint64_t operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform on (0, 1], 53-bit resolution. Never returns 0, so log() is safe.
  double uniform_open0() noexcept {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// CN(0,1): real and imaginary parts N(0, 1/2), Box-Muller.
  std::complex<double> complex_normal() noexcept {
    const double r = std::sqrt(-std::log(uniform_open0()));  // sqrt(-2 ln u) * sqrt(1/2)
    const double t = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// Standard normal N(0,1) (discards the paired Box-Muller output).
  double normal() noexcept {
    return std::sqrt(-2.0 * std::log(uniform_open0())) *
           std::cos(2.0 * std::numbers::pi * uniform());
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Key of substream `stream` under `seed`; distinct (seed, stream) pairs give unrelated keys.
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return CounterRng::mix(CounterRng::mix(seed ^ 0x6a09e667f3bcc909ULL) + stream);
}

constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b) noexcept {
  return substream_key(substream_key(seed, a), b);
}

}  // namespace fbtrack
