#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace c2g {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Precondition and argument violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when persisted data cannot be read or does not match the expected layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive independent RNG streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream key for (master seed, workspace id, stage).
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view workspace_id,
                                 std::string_view stage) {
  return mix64(mix64(master ^ hash_string(workspace_id)) ^ hash_string(stage));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace c2g
