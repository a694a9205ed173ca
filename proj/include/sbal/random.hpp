#pragma once

#include <cstdint>
#include <random>

#include "sbal/spectral.hpp"

namespace sbal {

// Uniform draw on [lo, hi) from the top 53 bits of a 64-bit Mersenne twister.
// Unlike std::uniform_real_distribution this is reproducible across standard libraries.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Symmetric matrix with i.i.d. uniform[-1, 1] entries on and above the diagonal.
inline FriendlinessMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double x = uniform(rng, -1.0, 1.0);
      m(i, j) = x;
      m(j, i) = x;
    }
  }
  return FriendlinessMatrix(std::move(m));
}

inline FriendlinessMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_symmetric(n, rng);
}

}  // namespace sbal
