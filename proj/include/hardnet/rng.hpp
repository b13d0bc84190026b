#pragma once

#include <cstdint>
#include <limits>

namespace hardnet {

/// Stream identifiers. Every random draw in the library is keyed by
/// (seed, stream, index) so results never depend on worker count.
enum class Stream : std::uint64_t {
  kDataset = 1,
  kTransform = 2,
  kAdversarial = 3,
  kSimulate = 4,
  kMonteCarlo = 5,
  kPredictor = 6,
  kGame = 7,
  kKeyedToy = 8,
  kRandomPoints = 9,
  kLwrSecret = 10,
  kTest = 99,
};

/// Counter-based generator. The output sequence is a pure function of the
/// (seed, stream, index) triple; it satisfies UniformRandomBitGenerator so
/// the <random> distributions can sit on top of it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t index)
      : CounterRng(seed, static_cast<std::uint64_t>(stream), index) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : state_(mix(mix(mix(seed) ^ stream) ^ index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return finalize(state_);
  }

 private:
  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static constexpr std::uint64_t mix(std::uint64_t x) { return finalize(x + 0x9E3779B97F4A7C15ULL); }

  std::uint64_t state_;
};

}  // namespace hardnet
