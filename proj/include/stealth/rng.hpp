#pragma once

#include <cstdint>

namespace stealth {

/// SplitMix64 (Steele, Lea, Flood; public domain reference by S. Vigna).
/// Counts its draws so replays can detect hidden extra consumption.
class SplitMix64 {
 public:
  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    ++draws_;
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<int>(next() % span);
  }

  std::uint64_t state() const { return state_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t draws_ = 0;
};

/// Independent stream per agent: the scenario seed mixed with the agent id.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t agent_id) {
  SplitMix64 mixer(seed ^ (agent_id * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
  return mixer.next();
}

}  // namespace stealth
