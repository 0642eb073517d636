#pragma once

// Parameter-update LPs of the diagonal, uniform-diagonal and matrix methods.
// All LPs maximize the sum of q over the sample set; shifted variants carry
// an extra variable gamma with objective weight -|S|.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "quadue/linops.hpp"
#include "quadue/underestimator.hpp"

namespace quadue {

struct LpLayout {
  Method method = Method::D;
  int n = 0;
  bool first = false;
  // Variable index of A(i, j), -1 when A(i, j) is fixed at 0.
  Eigen::MatrixXi a_index;
  // Auxiliaries of the matrix methods (off-diagonal entries only), else -1.
  Eigen::MatrixXi s_index;
  Eigen::MatrixXi t_index;
  int gamma_index = -1;
};

struct LpBuild {
  linops::LpInstance lp;
  LpLayout layout;
};

struct LpSampleSet {
  std::span<const Eigen::VectorXd> points;
  std::span<const double> values;  // f at each point
};

// Rows bounding q at a point use rhs f - l. For unshifted methods a deficit
// f - l in [-epsilon, 0) is rounded up to 0 so points the convergence test
// tolerates do not make the LP infeasible.
LpBuild build_lp(Method method, bool first_iteration, const QuadUnderestimator& incumbent,
                 const Eigen::VectorXd& x_star, double f_star, const LpSampleSet& samples, double epsilon);

// New parameters from an optimal LP solution, clamped so A_ii in [0, A^k_ii],
// gamma >= gamma^k and A Lambda symmetric.
QuadUnderestimator apply_lp_solution(const LpBuild& build, const linops::LpSolution& sol,
                                     const QuadUnderestimator& incumbent);

}  // namespace quadue
