#pragma once

#include <cmath>
#include <cstdint>

namespace voidplace {

/// Counter-based SplitMix64 stream.
///
/// Every generator is a (key, counter) pair: output n is a pure function of
/// the key and n, so a stream can be replayed from its seed alone.
/// `split(tag)` derives an independent child stream from (key, tag) without
/// consuming anything from the parent, which gives reproducible parallel
/// draws: the same seed and the same tag path always name the same stream,
/// no matter in which order streams are used.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

  /// Child stream identified by (this stream's key, tag). Pure: does not
  /// advance this stream, and the same tag always yields the same child.
  [[nodiscard]] SplitRng split(std::uint64_t tag) const {
    SplitRng child(0u);
    child.key_ = mix(key_ ^ mix(tag * kGolden + kTagSalt));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one value per call; the sine partner is
  /// discarded so consumption stays position-independent).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform integer in [0, n) via 128-bit multiply-shift.
  std::size_t uniform_below(std::size_t n) {
    const auto wide = static_cast<__uint128_t>(next_u64()) *
                      static_cast<__uint128_t>(n);
    return static_cast<std::size_t>(wide >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kTagSalt = 0x632BE59BD9B4E019ull;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace voidplace
