#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace phishlex::util {

// 64-bit FNV-1a, used for checkpoint checksums.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
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

// Derives an independent RNG stream from a base seed and a salt so that
// different consumers of one user-facing seed never share a stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt = 0) {
  return std::mt19937_64(salt == 0 ? seed : derive_seed(seed, salt));
}

// Shortest round-trip decimal form of a double ("37" for 37.0, full
// precision otherwise). Parsing the result recovers the exact bits.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace phishlex::util
