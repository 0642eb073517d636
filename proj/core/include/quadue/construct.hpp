#pragma once

// Cutting-plane construction of a valid quadratic underestimator of a d.c.
// function. The epigraph of h is outer-approximated by a vertex polytope;
// the concave objective t - g(x) - q(x) is minimized over its vertices and
// the parameters of q are corrected at violating vertices until the vertex
// minimum is at least -epsilon.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadue/dc_function.hpp"
#include "quadue/lp_builder.hpp"
#include "quadue/underestimator.hpp"

namespace quadue {

enum class Outcome { Converged, NotLocallyConvex, ShiftRequired, IterationLimit };

std::string_view to_string(Outcome o);

struct ConstructOptions {
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  // Size of the LP sample set; 0 means 100 n.
  int sample_size = 0;
  // Caller-owned sample set, used instead of drawing one when non-null.
  const std::vector<Eigen::VectorXd>* samples = nullptr;
  double psd_tol = 1e-9;
  int max_iterations = 5000;
  // Starting value of the diagonal of A.
  double initial_alpha = 1.0;
  // Called after every parameter update with the old and new parameters.
  std::function<void(const QuadUnderestimator& before, const QuadUnderestimator& after)> on_update;
  // Called with every LP before it is solved.
  std::function<void(const LpBuild&)> on_lp;
};

struct ConstructionReport {
  Outcome outcome = Outcome::Converged;
  int iterations = 0;
  std::int64_t vertices_enumerated = 0;
  int lp_solves = 0;
  int updates = 0;
  double wall_seconds = 0.0;
  // Vertex minimum of t - g - q, one entry per iteration.
  std::vector<double> bound_trace;
  double min_eigenvalue = 0.0;
  std::string failure;
};

struct ConstructionResult {
  QuadUnderestimator u;
  ConstructionReport report;

  bool converged() const { return report.outcome == Outcome::Converged; }
};

// Throws InvalidArgument for x0 outside the box or epsilon <= 0; numerical
// breakdowns surface as Error with the corresponding kind.
ConstructionResult construct(const DcFunction& f, const Eigen::VectorXd& x0, Method method,
                             const ConstructOptions& options = {});

}  // namespace quadue
