#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace driveiv {

// splitmix64 step; used to derive independent substreams from a master seed
// so that parallel replications are deterministic regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t id : ids) s = splitmix64(s ^ (id + 0x9e3779b97f4a7c15ULL));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

}  // namespace driveiv
