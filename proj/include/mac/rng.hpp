#pragma once

#include <cstdint>

namespace mac {

// Counter-based splittable generator. Each draw is mix(key + counter * gamma),
// so a stream is fully described by (key, counter) and substreams derived from
// distinct labels never share state.
class Rng {
 public:
  constexpr Rng() = default;

  static constexpr Rng from_seed(uint64_t seed) { return Rng(mix(seed ^ 0x6a09e667f3bcc909ull)); }

  constexpr Rng substream(uint64_t label) const {
    return Rng(mix(key_ ^ mix(label + 0x9e3779b97f4a7c15ull) ^ (counter_ * 0xbf58476d1ce4e5b9ull)));
  }

  constexpr uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform integer in [0, n); n must be > 0.
  uint32_t uniform_int(uint32_t n);
  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }

  constexpr uint64_t key() const { return key_; }
  constexpr uint64_t counter() const { return counter_; }
  static constexpr Rng from_raw(uint64_t key, uint64_t counter) {
    Rng r(key);
    r.counter_ = counter;
    return r;
  }

  friend constexpr bool operator==(const Rng&, const Rng&) = default;

  // SplitMix64 finalizer.
  static constexpr uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  constexpr explicit Rng(uint64_t key) : key_(key) {}

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

// Labels for per-step substreams.
enum class Stream : uint64_t {
  cell_conflict = 1,
  move_conflict = 2,
  do_effects = 3,
  mobs = 4,
  spawn = 5,
  worldgen = 6,
  spawns = 7,
  policy = 8,
  auto_reset = 9,
};

inline Rng step_stream(const Rng& world, int64_t step, Stream purpose) {
  return world.substream(static_cast<uint64_t>(step)).substream(static_cast<uint64_t>(purpose));
}

}  // namespace mac
