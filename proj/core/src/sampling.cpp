#include "quadue/sampling.hpp"

#include <array>
#include <limits>
#include <cmath>
#include <numeric>

#include "quadue/error.hpp"

namespace quadue {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r < limit) return r % n;
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (label + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SamplePlan latin_hypercube(const BoxDomain& box, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  const int n = box.dim();
  Rng rng(seed);
  SamplePlan plan;
  plan.seed = seed;
  plan.n = n;
  plan.count = count;
  plan.points.assign(static_cast<std::size_t>(count), Eigen::VectorXd(n));
  std::vector<int> strata(static_cast<std::size_t>(count));
  for (int d = 0; d < n; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(strata);
    const double w = box.width()[d] / count;
    for (int k = 0; k < count; ++k)
      plan.points[static_cast<std::size_t>(k)][d] = box.lower()[d] + w * (strata[static_cast<std::size_t>(k)] + rng.uniform());
  }
  return plan;
}

std::vector<Eigen::VectorXd> scrambled_halton(const BoxDomain& box, int count, std::uint64_t seed) {
  static constexpr std::array<int, 8> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19};
  const int n = box.dim();
  if (n > static_cast<int>(kPrimes.size())) throw Error(ErrorKind::InvalidArgument, "Halton dimension too large");
  Rng rng(seed);
  std::vector<std::vector<int>> perm(static_cast<std::size_t>(n));
  std::vector<double> shift(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const int b = kPrimes[static_cast<std::size_t>(d)];
    std::vector<int> digits(static_cast<std::size_t>(b - 1));
    std::iota(digits.begin(), digits.end(), 1);
    rng.shuffle(digits);
    perm[static_cast<std::size_t>(d)].push_back(0);
    perm[static_cast<std::size_t>(d)].insert(perm[static_cast<std::size_t>(d)].end(), digits.begin(), digits.end());
    shift[static_cast<std::size_t>(d)] = rng.uniform();
  }
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(count), Eigen::VectorXd(n));
  for (int k = 0; k < count; ++k) {
    for (int d = 0; d < n; ++d) {
      const int b = kPrimes[static_cast<std::size_t>(d)];
      double inv = 1.0 / b, u = 0.0;
      for (long i = k + 1; i > 0; i /= b, inv /= b) u += perm[static_cast<std::size_t>(d)][static_cast<std::size_t>(i % b)] * inv;
      u += shift[static_cast<std::size_t>(d)];
      u -= std::floor(u);
      out[static_cast<std::size_t>(k)][d] = box.lower()[d] + box.width()[d] * u;
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> midpoint_grid(const BoxDomain& box, int per_dim) {
  if (per_dim < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be positive");
  const int n = box.dim();
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(per_dim);
  std::vector<Eigen::VectorXd> out;
  out.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const Eigen::VectorXd step = box.width() / per_dim;
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d) x[d] = box.lower()[d] + step[d] * (idx[static_cast<std::size_t>(d)] + 0.5);
    out.push_back(std::move(x));
    for (int d = 0; d < n && ++idx[static_cast<std::size_t>(d)] == per_dim; ++d) idx[static_cast<std::size_t>(d)] = 0;
  }
  return out;
}

}  // namespace quadue
