#pragma once

#include <cstdint>
#include <limits>

namespace rig {

// Which family of draws a stream feeds. Distinct kinds never share a stream,
// so weight draws and edge draws stay independent and replayable.
enum class StreamKind : std::uint64_t {
  AttributeWeight = 1,
  VertexWeight = 2,
  NaiveEdges = 3,
  FastEdges = 4,
  Replica = 5,
  Auxiliary = 6,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ keyed by (seed, kind, index). Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
    std::uint64_t key = seed;
    std::uint64_t h = splitmix64(key);
    key = h ^ (static_cast<std::uint64_t>(kind) * 0xd6e8feb86659fd93ULL);
    h = splitmix64(key);
    key = h ^ index;
    for (auto& word : s_) word = splitmix64(key);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_positive() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

// Seed of the r-th replica derived from a base seed.
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  Stream s(seed, StreamKind::Replica, replica);
  return s();
}

}  // namespace rig
