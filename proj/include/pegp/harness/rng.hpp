#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pegp::harness {

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for the named stream of a master seed.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view stream) {
  return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ fnv1a(stream)));
}

}  // namespace pegp::harness
