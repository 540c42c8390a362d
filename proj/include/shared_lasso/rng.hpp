#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace shared_lasso {

using Rng = std::mt19937_64;

/// One round of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a hash of a stream name, used to split one master seed by purpose.
constexpr std::uint64_t stream_tag(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Stable derivation of a child seed from a master seed and a path of keys.
/// Adding keys at the end never changes seeds derived from shorter paths.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t key : path) s = splitmix64(s ^ splitmix64(key + 0x632BE59BD9B4E019ULL));
  return s;
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  return derive_seed(master, {stream_tag(stream)});
}

}  // namespace shared_lasso
