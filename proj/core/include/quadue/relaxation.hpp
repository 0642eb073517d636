#pragma once

// Root-node convex relaxations of d.c. problems: every nonlinear function is
// replaced by the pointwise maximum of convex quadratic underestimators built
// at Latin hypercube points, and the resulting convex QCQP is bounded from
// below by Kelley's cutting-plane method.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "quadue/construct.hpp"
#include "quadue/problem.hpp"

namespace quadue {

struct LinearRow {
  Eigen::VectorXd a;
  double b = 0.0;  // a.x <= b
};

struct QuadGroup {
  std::vector<QuadUnderestimator> qs;
  double rhs = 0.0;  // unused for the objective group
};

struct QcqpRelaxation {
  BoxDomain box;
  QuadGroup objective;             // t >= q(x) - shift for every q
  std::vector<QuadGroup> constraints;  // q(x) - shift <= rhs for every q
  std::vector<LinearRow> linear;
  // Subtracted from every q; the construction certifies f >= q - epsilon.
  double shift = 0.0;
  int constructions = 0;
};

struct RelaxationOptions {
  int per_dim = 4;
  Method method = Method::DS;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  // Starting diagonal of A, 0 for the linear baseline.
  double initial_alpha = 1.0;
};

// Throws InvalidConfig when per_dim < 1 and NoValidPoint when no locally
// convex point of construction turns up within 100 per_dim n draws.
QcqpRelaxation build_relaxation(const ProblemInstance& p, const RelaxationOptions& options);

// Same points of construction, method SS started from alpha = 0: a shifted
// tangent-plane relaxation.
QcqpRelaxation build_baseline_relaxation(const ProblemInstance& p, RelaxationOptions options);

struct KelleyResult {
  double bound = 0.0;
  Eigen::VectorXd x;
  double t = 0.0;
  int iterations = 0;
  int cuts = 0;
  double max_violation = 0.0;
};

// Lower bound within tol of the relaxation optimum. Throws IterationLimit past
// max_cuts and InfeasibleInstance when the relaxation is infeasible.
KelleyResult solve_qcqp(const QcqpRelaxation& r, double tol = 1e-6, int max_cuts = 5000);

struct ReferenceOptimum {
  double value = 0.0;
  Eigen::VectorXd x;
  int feasible_points = 0;
};

// Best feasible objective over a 512^n grid (n <= 2) or 2^18 scrambled Halton
// points, then compass search from the 32 best. Throws InfeasibleInstance.
ReferenceOptimum reference_optimum(const ProblemInstance& p, std::uint64_t seed = 0);

struct BoundResult {
  double lb_quad = 0.0;
  double lb_base = 0.0;
  double reference = 0.0;
  double gap_reduction = 0.0;
  int constructions = 0;
  int cuts = 0;
  int kelley_iterations = 0;
};

// (lb_quad - lb_base) / (opt - lb_base), 0 when the baseline has no gap.
double gap_reduction(double lb_quad, double lb_base, double opt);

double baseline_linear_bound(const ProblemInstance& p, const RelaxationOptions& options);

BoundResult bound_problem(const ProblemInstance& p, const RelaxationOptions& options);

}  // namespace quadue
