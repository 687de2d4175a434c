#pragma once

#include <array>
#include <cstdint>

namespace pommer {

// splitmix64 (Steele, Lea, Vigna). Used to expand a user seed into generator
// state and to derive independent stream seeds; results are identical on every
// platform, which is what makes replays and worker merges reproducible.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d4a24bf851aae9ull;
  return z ^ (z >> 31);
}

// xoshiro256** 1.0 (Blackman, Vigna), seeded through splitmix64 so that any
// 64-bit seed (including 0) produces a well-mixed state.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  uint64_t operator()() { return next(); }
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ull; }

  // Uniform integer in [0, bound) by rejection sampling; unbiased and
  // platform-independent (std::uniform_int_distribution is neither).
  uint64_t next_below(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return (next() >> 11) * 0x1.0p-53; }

  // Raw state access for exact serialization round trips.
  std::array<uint64_t, 4> state_words() const { return {s_[0], s_[1], s_[2], s_[3]}; }
  void set_state_words(const std::array<uint64_t, 4>& w) {
    for (int i = 0; i < 4; ++i) s_[i] = w[i];
  }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.s_[0] == b.s_[0] && a.s_[1] == b.s_[1] && a.s_[2] == b.s_[2] && a.s_[3] == b.s_[3];
  }

  // Derives a child seed; stream_id separates consumers of one parent seed.
  static uint64_t derive(uint64_t seed, uint64_t stream_id) {
    uint64_t sm = seed + 0x632be59bd9b4e019ull * (stream_id + 1);
    uint64_t a = splitmix64(sm);
    uint64_t b = splitmix64(sm);
    return a ^ rotl(b, 32);
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  uint64_t s_[4];
};

// FNV-1a 64-bit, the hash used for state fingerprints in replays and logs.
class Fnv1a {
 public:
  void add_byte(uint8_t b) {
    hash_ ^= b;
    hash_ *= 0x100000001b3ull;
  }
  void add_u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) add_byte(static_cast<uint8_t>(v >> (8 * i)));
  }
  void add_u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) add_byte(static_cast<uint8_t>(v >> (8 * i)));
  }
  void add_i32(int32_t v) { add_u32(static_cast<uint32_t>(v)); }
  uint64_t value() const { return hash_; }

 private:
  uint64_t hash_ = 0xcbf29ce484222325ull;
};

}  // namespace pommer
