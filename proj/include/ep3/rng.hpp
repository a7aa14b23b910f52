#pragma once

// Counter-based stream derivation: every task draws from its own generator,
// seeded from (master seed, task index), so results do not depend on thread
// scheduling.

#include <cstdint>
#include <random>

namespace ep3 {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Nested streams: stream_seed(stream_seed(master, a), b).
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return stream_seed(stream_seed(master, a), b);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(stream_seed(master, index));
}

}  // namespace ep3
