#pragma once

#include <cstdint>
#include <random>

namespace cs {

/// SplitMix64 step (Steele, Lea, Flood 2014). Used only to derive seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic child seed for stream `a`, item `b` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Portable random stream: std::mt19937_64 engine, 53-bit uniforms and
/// Box-Muller normals. The distributions are implemented here rather than
/// taken from <random> because the standard leaves their algorithms open.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cs
