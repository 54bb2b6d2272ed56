#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace bayesbench {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Splittable seed stream: every child seed is a hash of the parent and a
/// labelled path, so results do not depend on execution order.
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t root) : state_(splitmix64(root)) {}

  SeedSequence child(std::string_view label) const {
    return SeedSequence(state_, splitmix64(state_ ^ fnv1a(label)));
  }
  SeedSequence child(std::uint64_t index) const {
    return SeedSequence(state_, splitmix64(state_ + 0x632be59bd9b4e019ULL * (index + 1)));
  }

  std::uint64_t seed() const { return state_; }
  Rng rng() const { return Rng(state_); }

 private:
  SeedSequence(std::uint64_t, std::uint64_t derived) : state_(derived) {}
  std::uint64_t state_;
};

}  // namespace bayesbench
