#pragma once

#include <cstdint>
#include <random>

#include "gdesc/common.hpp"

namespace gdesc {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// splitmix64 step; used to derive independent per-unit streams from one seed
// so results do not depend on worker count or execution order.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Vector random_gaussian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

// Uniform on the Euclidean unit sphere.
inline Vector random_l2_unit(int d, std::mt19937_64& rng) {
  Vector v = random_gaussian(d, rng);
  double n = v.norm();
  while (n < 1e-12) {
    v = random_gaussian(d, rng);
    n = v.norm();
  }
  return v / n;
}

// Uniform in the Euclidean unit ball.
inline Vector random_l2_ball(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v = random_l2_unit(d, rng);
  return v * std::pow(u(rng), 1.0 / d);
}

}  // namespace gdesc
