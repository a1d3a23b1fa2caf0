#pragma once

#include <cmath>
#include <cstdint>

namespace resultlab {

// Counter-based splittable generator. Every draw is a pure function of
// (seed, stream, counter), so per-trial streams can be created up front and
// trials may run in any order (or concurrently) without changing outputs.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : key_(mix(mix(seed) ^ mix(stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull))),
        ctr_(0) {}

  // Child stream derived from this stream's key; independent counter.
  Rng split(uint64_t substream) const {
    Rng r(0);
    r.key_ = mix(key_ ^ mix(substream + 0x8CB92BA72F3D8DD7ull));
    r.ctr_ = 0;
    return r;
  }

  uint64_t next_u64() { return mix(key_ + (++ctr_) * 0x9E3779B97F4A7C15ull); }

  // Uniform in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased.
  uint64_t next_below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller (explicit formulas keep streams
  // reproducible across standard libraries).
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 6.283185307179586476925287 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t ctr_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Stream for trial `trial_index` of a run seeded with `seed`.
inline Rng trial_stream(uint64_t seed, uint64_t trial_index) {
  return Rng(seed, trial_index + 1);
}

}  // namespace resultlab
