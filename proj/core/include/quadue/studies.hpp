#pragma once

// Batch experiments: the method-hierarchy comparison over the benchmark
// functions and the root-node bound comparison over a problem set. Results
// are independent of the job count; timing is kept out of the main tables so
// they stay byte-stable.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadue/construct.hpp"
#include "quadue/problem.hpp"
#include "quadue/relaxation.hpp"

namespace quadue {

// Runs task(i) for i in [0, count) on up to jobs threads. jobs <= 0 means
// hardware concurrency. Exceptions are rethrown after all threads join.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

struct HierarchyOptions {
  std::uint64_t seed = 0;
  double epsilon = 1e-3;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  int points_per_function = 25;
  int sample_size = 0;    // 0 means 100 n
  int metric_points = 0;  // 0 means the integrator default
  int jobs = 1;
  // Inspection hooks, forwarded into every construction. With jobs > 1 they
  // run concurrently and must be thread-safe.
  std::function<void(const DcFunction& f, const QuadUnderestimator& before, const QuadUnderestimator& after)>
      on_update;
  std::function<void(const DcFunction& f, const ConstructionResult& r)> on_result;
};

// Group 1: the unshifted scalar method converges. Group 2: it needs a shift.
// Group 0: neither (iteration limit); kept for the record only.
struct HierarchyRow {
  std::string function;
  int n = 0;
  int point = 0;
  Eigen::VectorXd x0;
  int group = 0;
  Method method = Method::S;
  Outcome outcome = Outcome::Converged;
  double metric = std::numeric_limits<double>::quiet_NaN();
  double alpha_min = 0.0;  // smallest diagonal entry of A
  double gamma = 0.0;
  int iterations = 0;
  std::int64_t vertices = 0;
  int lp_solves = 0;
  double wall_seconds = 0.0;
};

struct HierarchyStudy {
  std::vector<HierarchyRow> rows;
  // Locally convex points accepted and LHS points drawn, per function.
  std::vector<std::pair<std::string, int>> draws;
};

HierarchyStudy run_hierarchy_study(const std::vector<DcFunction>& functions, const HierarchyOptions& options);

struct MethodAggregate {
  int group = 0;
  int n = 0;
  Method method = Method::S;
  int count = 0;       // rows with a metric
  int converged = 0;
  int attempted = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double mean_iterations = 0.0;
  double mean_vertices = 0.0;
  double mean_lp_solves = 0.0;
};

// Grouped by (group, n, method) in that order; groups 1 and 2 only.
std::vector<MethodAggregate> aggregate(const HierarchyStudy& study);

// Per-point rows of one group, without timing.
std::string hierarchy_csv(const HierarchyStudy& study, int group);
std::string hierarchy_summary_csv(const std::vector<MethodAggregate>& agg);
std::string hierarchy_timing_csv(const HierarchyStudy& study);

struct BoundStudyOptions {
  RelaxationOptions relaxation;
  int jobs = 1;
};

struct BoundRow {
  std::string problem;
  int n = 0;
  BoundResult result;
  double wall_seconds = 0.0;
};

std::vector<BoundRow> run_bound_study(const std::vector<ProblemInstance>& problems, const BoundStudyOptions& options);

// One row per problem followed by one aggregate row per dimension.
std::string bound_csv(const std::vector<BoundRow>& rows);
std::string bound_timing_csv(const std::vector<BoundRow>& rows);

// Fixed-precision number for CSV output; "nan" for NaN.
std::string csv_number(double v, int digits = 6);

}  // namespace quadue
