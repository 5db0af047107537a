#pragma once

#include <cstdint>
#include <random>

namespace rfpde {

/// Mixes a base seed with a stream index (SplitMix64 finalizer), so one user
/// seed can drive several independent generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than through
/// <random> distribution classes, whose algorithms are implementation-defined,
/// so a seed reproduces the same draws with every standard library.
///
///  - uniform: top 53 bits of one engine output, scaled to [0, 1)
///  - normal:  Box-Muller on two uniforms, both variates used
///  - cauchy:  inverse CDF, scale * tan(pi * (u - 1/2)) with u in (0, 1)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double cauchy(double scale);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rfpde
