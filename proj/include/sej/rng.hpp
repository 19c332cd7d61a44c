#pragma once

// Reproducible random streams. Every stream is a std::mt19937_64 (whose
// output sequence is fixed by the C++ standard) seeded through SplitMix64.
// Variates are produced by the algorithms below rather than the <random>
// distribution classes, whose output differs between standard libraries.

#include <cstdint>
#include <random>
#include <string_view>

namespace sej {

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64+splitmix64/polar-normal/marsaglia-tsang-gamma/beta-ratio";

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Seed for an independent stream identified by `label` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  double normal();
  // Gamma(shape, 1), shape > 0.
  double gamma(double shape);
  double beta(double a, double b);
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sej
