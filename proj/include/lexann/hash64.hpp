#pragma once

#include <cstdint>
#include <string_view>

namespace lexann {

// Seeded 64-bit string hash: FNV-1a over the bytes with the seed folded
// into the initial state, splitmix64 finalizer for avalanche.
// Not cryptographic. The constants are frozen: changing them changes every
// lexical-LSH encoding and invalidates persisted indexes.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash64(std::uint64_t seed, std::string_view data) noexcept {
  constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
  constexpr std::uint64_t kFnvPrime = 0x00000100000001b3ULL;
  std::uint64_t h = kFnvOffset ^ splitmix64(seed);
  for (char c : data) {
    h = (h ^ static_cast<unsigned char>(c)) * kFnvPrime;
  }
  return splitmix64(h);
}

/// Maps a 64-bit hash onto [0, buckets) by splitting the hash range into
/// `buckets` equal contiguous intervals (multiply-shift, no modulo bias).
constexpr std::uint32_t hash_bucket(std::uint64_t hash, std::uint32_t buckets) noexcept {
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(hash) * buckets) >> 64);
}

}  // namespace lexann
