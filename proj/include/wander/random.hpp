#pragma once

#include <cstdint>
#include <string_view>

namespace wander {

/// splitmix64 finalizer; used to derive independent per-stage streams.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Per-run root seed fanned out to a (scene, situation) pair. Stable across
/// runs, platforms and job counts.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view scene_id,
                                    std::string_view situation_id) {
  return mix_seed(mix_seed(root, fnv1a(scene_id)), fnv1a(situation_id));
}

}  // namespace wander
