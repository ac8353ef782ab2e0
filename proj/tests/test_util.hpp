#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "carrystate/basis.hpp"
#include "carrystate/rng.hpp"

namespace cs::test {

inline Field random_field(int d, int n, int channels, std::uint64_t seed) {
  Field f(d, n, channels);
  Rng rng(seed);
  for (double& v : f.data) v = rng.normal();
  return f;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  double e = 0, t = 0;
  for (std::size_t i = 0; i < a.coef.size(); ++i) {
    e += std::norm(a.coef[i] - b.coef[i]);
    t += std::norm(b.coef[i]);
  }
  return t > 0 ? std::sqrt(e / t) : std::sqrt(e);
}

}  // namespace cs::test
