// Microbenchmarks of the hot paths: LP solves, polytope cuts, single
// constructions and metric evaluation.

#include <benchmark/benchmark.h>

#include "quadue/construct.hpp"
#include "quadue/linops.hpp"
#include "quadue/metric.hpp"
#include "quadue/problem.hpp"
#include "quadue/sampling.hpp"
#include "quadue/vertex_polytope.hpp"

using namespace quadue;
using Eigen::VectorXd;

namespace {

VectorXd convex_point(const DcFunction& f) {
  for (const auto& x : latin_hypercube(f.box(), 50, 1).points)
    if (check_local_convexity(f, x).convex) return x;
  return f.box().center();
}

void BM_SolveLp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  linops::LpInstance lp(n);
  for (int j = 0; j < n; ++j) {
    lp.objective()[j] = rng.uniform();
    lp.set_bounds(j, 0, 10);
  }
  for (int i = 0; i < 2 * n; ++i) {
    VectorXd a(n);
    for (int j = 0; j < n; ++j) a[j] = rng.uniform();
    lp.add_row(a, linops::Sense::LessEqual, 1 + rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(linops::solve_lp(lp).objective);
}
BENCHMARK(BM_SolveLp)->Arg(4)->Arg(16)->Arg(48);

void BM_AddCut(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto p = VertexPolytope::box(VectorXd::Constant(d, -1), VectorXd::Constant(d, 1));
    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
      VectorXd a(d);
      for (int i = 0; i < d; ++i) a[i] = 2 * rng.uniform() - 1;
      a.normalize();
      p.add_cut({a, 0.8});
    }
    benchmark::DoNotOptimize(p.num_vertices());
  }
}
BENCHMARK(BM_AddCut)->Arg(2)->Arg(3)->Arg(5);

void BM_Construct(benchmark::State& state) {
  const auto& f = coconut_function("camel6");
  const Method m = kAllMethods[static_cast<std::size_t>(state.range(0))];
  const VectorXd x0 = convex_point(f);
  state.SetLabel(std::string(to_string(m)));
  for (auto _ : state) benchmark::DoNotOptimize(construct(f, x0, m).report.iterations);
  state.counters["iterations"] = construct(f, x0, m).report.iterations;
}
BENCHMARK(BM_Construct)->DenseRange(0, 6)->Unit(benchmark::kMillisecond);

void BM_Metric(benchmark::State& state) {
  const auto& f = coconut_function("conform1");
  const VectorXd x0 = convex_point(f);
  const auto u = make_underestimator(check_local_convexity(f, x0), x0, Method::S, 0.5);
  const MetricIntegrator rule(f);
  for (auto _ : state) benchmark::DoNotOptimize(metric(u, rule).value);
}
BENCHMARK(BM_Metric)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
