#pragma once

// Seedable, splittable random streams.
//
// Every stochastic draw in a simulation comes from a stream derived from
// (base seed, purpose tag, run index, consumer index). Streams never share
// state, so results do not depend on how runs are scheduled across threads.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace mpb {

/// Finalizer from SplitMix64; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
  using result_type = std::uint64_t;

  constexpr explicit RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// p = 0 never fires, p = 1 always fires.
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Independent child stream keyed by this stream's seed material and `keys`.
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return RandomStream(h);
  }

private:
  std::uint64_t state_;
};

/// Purpose tags for derived streams.
namespace stream_tag {
inline constexpr std::uint64_t kInstance = 0x1;
inline constexpr std::uint64_t kConsumerFeatures = 0x2;
inline constexpr std::uint64_t kSession = 0x3;
inline constexpr std::uint64_t kProductSample = 0x4;
}  // namespace stream_tag

}  // namespace mpb
