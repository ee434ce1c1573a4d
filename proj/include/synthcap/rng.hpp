#pragma once

#include <cstdint>
#include <span>

namespace synthcap {

// Counter-based deterministic generator.  Each (root seed, stream, index)
// triple yields an independent stream, so parallel trials can draw their own
// generator without sharing state.  The core is the splitmix64 permutation,
// which is stable across platforms (unlike std::uniform_real_distribution).
class Rng {
 public:
  Rng(std::uint64_t root_seed, std::uint64_t stream, std::uint64_t index = 0) {
    state_ = mix(root_seed ^ 0x8f1bbcdcbfa53e0bULL);
    state_ = mix(state_ ^ stream * 0xd1342543de82ef95ULL);
    state_ = mix(state_ ^ index * 0x2545f4914f6cdd1dULL);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix_out(state_);
  }

  // Uniform on [0,1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Index into [0,n).
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  // Samples an index from a pmf given as raw probabilities (assumed to sum
  // to ~1).  Falls back to the last positive atom on rounding shortfall.
  std::size_t sample(std::span<const double> probs) {
    double u = next_double();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) last_positive = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }
  static std::uint64_t mix_out(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Fixed stream tags so that independent operations never collide on the same
// counter stream.
namespace rng_stream {
inline constexpr std::uint64_t kCodebook = 1;
inline constexpr std::uint64_t kEncoder = 2;
inline constexpr std::uint64_t kDecoder = 3;
inline constexpr std::uint64_t kRestart = 4;
inline constexpr std::uint64_t kTrial = 5;
inline constexpr std::uint64_t kDetector = 6;
inline constexpr std::uint64_t kTest = 7;
}  // namespace rng_stream

}  // namespace synthcap
