#include <cmath>

#include "quadue/error.hpp"
#include "quadue/generator.hpp"
#include "quadue/linops.hpp"

namespace quadue {

namespace {

using expr::Expr;

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Constants keep three decimals, like the printed problems.
double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

// Random nonempty variable subset with weights of magnitude in [0.5, 1.5].
std::vector<std::pair<int, double>> random_weights(int n, Rng& rng, bool positive) {
  std::vector<std::pair<int, double>> w;
  while (w.empty()) {
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.5) continue;
      double c = round3(uniform(rng, 0.5, 1.5));
      if (!positive && rng.uniform() < 0.5) c = -c;
      w.emplace_back(i, c);
    }
  }
  return w;
}

Expr affine(const std::vector<std::pair<int, double>>& w, double offset) {
  std::vector<Expr> terms;
  for (const auto& [i, c] : w) terms.push_back(Expr(c) * Expr::variable(i));
  if (offset != 0.0) terms.emplace_back(offset);
  return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
}

double abs_sum(const std::vector<std::pair<int, double>>& w) {
  double s = 0.0;
  for (const auto& p : w) s += std::abs(p.second);
  return s;
}

// sum_i w_i (0.909 x_i + 1), positive on [-1, 1]^n for positive weights.
Expr shifted_positive(const std::vector<std::pair<int, double>>& w) {
  std::vector<Expr> terms;
  for (const auto& [i, c] : w) terms.push_back(Expr(c) * (Expr(0.909) * Expr::variable(i) + Expr(1.0)));
  return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
}

Expr convex_atom(int n, Rng& rng) {
  const double c = round3(uniform(rng, 0.5, 2.0));
  switch (rng.below(6)) {
    case 0: {
      const auto w = random_weights(n, rng, false);
      const int k = rng.below(2) == 0 ? 2 : 4;
      return Expr(c) * expr::pow(affine(w, round3(uniform(rng, -0.5, 0.5))), k);
    }
    case 1:
      return Expr(c) * expr::exp(affine(random_weights(n, rng, false), 0.0));
    case 2: {
      const auto w = random_weights(n, rng, false);
      const double b = round3(abs_sum(w) + uniform(rng, 0.1, 1.0));
      return Expr(-c) * expr::log(affine(w, b));
    }
    case 3: {
      const auto w = random_weights(n, rng, false);
      const double b = round3(abs_sum(w) + uniform(rng, 0.2, 1.0));
      const double p = rng.below(2) == 0 ? 1.0 : 0.667;
      return Expr(c) * expr::pow(affine(w, b), -p);
    }
    case 4: {
      const double p = rng.below(2) == 0 ? 0.1 : 0.75;
      return Expr(-c) * expr::pow(shifted_positive(random_weights(n, rng, true)), p);
    }
    default: {
      // exp of a small convex quadratic: convex nondecreasing of convex.
      const auto w = random_weights(n, rng, false);
      return Expr(c) * expr::exp(Expr(0.5) * expr::pow(affine(w, round3(uniform(rng, -0.5, 0.5))), 2));
    }
  }
}

}  // namespace

bool psd_on(const expr::Expr& e, const std::vector<Eigen::VectorXd>& points, double tol) {
  for (const auto& x : points) {
    const Eigen::MatrixXd H = expr::hessian(e, x);
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    if (linops::min_eigenvalue(H) < -tol * scale) return false;
  }
  return true;
}

expr::Expr sample_convex_body(int n, Rng& rng, const std::vector<Eigen::VectorXd>& check_points) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int atoms = 1 + static_cast<int>(rng.below(3));
    std::vector<Expr> terms;
    for (int a = 0; a < atoms; ++a) terms.push_back(convex_atom(n, rng));
    const Expr body = terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -1.0), hi = Eigen::VectorXd::Constant(n, 1.0);
    try {
      expr::check_domain(body, lo, hi);
    } catch (const Error&) {
      continue;
    }
    if (psd_on(body, check_points)) return body;
  }
  throw Error(ErrorKind::CatalogExhausted, "no convex body passed verification");
}

}  // namespace quadue
