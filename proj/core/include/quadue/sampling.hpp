#pragma once

// Seeded, platform-stable sampling: Latin hypercube designs, scrambled Halton
// sequences and midpoint grids.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "quadue/dc_function.hpp"

namespace quadue {

// mt19937_64 with hand-rolled transforms so draws do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  std::uint64_t bits() { return engine_(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label);

struct SamplePlan {
  std::vector<Eigen::VectorXd> points;
  std::uint64_t seed = 0;
  int n = 0;
  int count = 0;
};

inline int default_sample_size(int n) { return 100 * n; }

// One point per stratum in every coordinate.
SamplePlan latin_hypercube(const BoxDomain& box, int count, std::uint64_t seed);

// Halton points with seeded digit permutations and a random rotation.
std::vector<Eigen::VectorXd> scrambled_halton(const BoxDomain& box, int count, std::uint64_t seed);

// Cell midpoints of a per_dim^n tensor grid.
std::vector<Eigen::VectorXd> midpoint_grid(const BoxDomain& box, int per_dim);

}  // namespace quadue
