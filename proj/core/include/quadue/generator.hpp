#pragma once

// Random d.c. test problems on [-1, 1]^n: objective and d.c. constraints are
// sums of the core univariate functions plus a linking term; convex
// constraints come from a catalog of convex atoms; every right-hand side cuts
// a fixed fraction of the surviving sample points.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadue/problem.hpp"
#include "quadue/sampling.hpp"

namespace quadue {

// A random convex body in n variables, verified to have a PSD Hessian at
// every check point. Throws CatalogExhausted after repeated rejections.
expr::Expr sample_convex_body(int n, Rng& rng, const std::vector<Eigen::VectorXd>& check_points);

// True when the Hessian of e is PSD within tol at every point.
bool psd_on(const expr::Expr& e, const std::vector<Eigen::VectorXd>& points, double tol = 1e-9);

// Right-hand side leaving exactly round(fraction * |values|) values above it
// when the values allow; with ties the largest rhs that cuts at least that
// many. Throws DegenerateSpread when all values coincide.
double rhs_binary_search(std::vector<double> values, double fraction = 0.2);
double rhs_binary_search(const expr::Expr& body, const std::vector<Eigen::VectorXd>& sample, double fraction = 0.2);

struct ProblemSpec {
  int n = 1;
  int m_linear = 0;
  int m_convex = 1;
  int m_dc = 1;
  std::uint64_t seed = 0;
  std::string name;  // defaults to a name built from the tuple and seed
};

// sum_j core_dc(t_j)(x_j) + link_term(n) for n > 1, split into h and g.
DcFunction compose_core(const std::vector<int>& tuple, const std::string& name);

ProblemInstance generate_problem(const ProblemSpec& spec);

}  // namespace quadue
