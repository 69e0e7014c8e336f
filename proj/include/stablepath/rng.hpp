#pragma once

#include <cstdint>
#include <random>

namespace stablepath {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Collapse a (seed, stream) pair into one well-dispersed engine seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= 0xd1b54a32d192ed03ull * (stream + 1);
  std::uint64_t b = splitmix64(state);
  return a ^ (b + 0x8bb84b93962eacc9ull + (a << 6) + (a >> 2));
}

}  // namespace detail

// Deterministic uniform source. Distinct (seed, stream) pairs give
// independent-looking streams; equal pairs reproduce bit-identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(detail::mix_seed(seed, stream)) {}

  // Strictly inside (0,1): 53 random bits centered in the unit lattice cell.
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace stablepath
