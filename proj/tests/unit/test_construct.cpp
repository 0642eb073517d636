#include <cmath>

#include "doctest.h"
#include "quadue/construct.hpp"
#include "quadue/error.hpp"
#include "quadue/problem.hpp"
#include "quadue/sampling.hpp"

using namespace quadue;
using Eigen::VectorXd;

namespace {

double worst_violation(const DcFunction& f, const QuadUnderestimator& u) {
  double worst = -1e300;
  const int per = f.dim() == 1 ? 4000 : 120;
  for (const auto& x : midpoint_grid(f.box(), per)) worst = std::max(worst, q_eval(u, x) - f.value(x));
  return worst;
}

}  // namespace

TEST_CASE("zy2 with the scalar method") {
  const auto& f = coconut_function("zy2");
  ConstructOptions o;
  const auto r = construct(f, VectorXd::Constant(1, 5.24), Method::S, o);
  REQUIRE(r.converged());
  CHECK(r.u.alpha() > 0.0);
  CHECK(r.u.alpha() < 1.0);
  CHECK(worst_violation(f, r.u) <= 2 * o.epsilon);
  CHECK(r.report.bound_trace.back() >= -o.epsilon);
}

TEST_CASE("every method on a 2D function is valid and monotone") {
  const auto& f = coconut_function("camel6");
  const auto pts = latin_hypercube(f.box(), 40, 3).points;
  int done = 0;
  for (const auto& x0 : pts) {
    if (!check_local_convexity(f, x0).convex) continue;
    for (Method m : kAllMethods) {
      CAPTURE(to_string(m));
      ConstructOptions o;
      int updates = 0;
      o.on_update = [&](const QuadUnderestimator& a, const QuadUnderestimator& b) {
        ++updates;
        for (const auto& y : latin_hypercube(f.box(), 50, 4).points) CHECK(q_eval(b, y) <= q_eval(a, y) + 1e-10);
      };
      const auto r = construct(f, x0, m, o);
      if (r.report.outcome == Outcome::ShiftRequired) {
        CHECK_FALSE(has_shift(m));
        continue;
      }
      REQUIRE(r.converged());
      CHECK(r.report.updates == updates);
      CHECK(worst_violation(f, r.u) <= 2 * o.epsilon);
      CHECK(r.report.min_eigenvalue >= -1e-8);
      const auto& tr = r.report.bound_trace;
      for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] >= tr[i - 1] - 1e-9);
    }
    if (++done == 3) break;
  }
  CHECK(done == 3);
}

TEST_CASE("shift required, then resolved by a shift method") {
  const auto& f = coconut_function("ex4_1_6");
  const VectorXd x0 = VectorXd::Constant(1, -0.125);
  CHECK(construct(f, x0, Method::S).report.outcome == Outcome::ShiftRequired);
  CHECK(construct(f, x0, Method::D).report.outcome == Outcome::ShiftRequired);
  for (Method m : {Method::SS, Method::UDS, Method::DS, Method::MS}) {
    const auto r = construct(f, x0, m);
    REQUIRE(r.converged());
    CHECK(r.u.gamma > 0.0);
    CHECK(worst_violation(f, r.u) <= 2e-3);
  }
}

TEST_CASE("not locally convex and bad arguments") {
  const auto& f = coconut_function("zy2");
  CHECK(construct(f, VectorXd::Constant(1, 1.0), Method::S).report.outcome == Outcome::NotLocallyConvex);
  CHECK_THROWS_AS(construct(f, VectorXd::Constant(1, 9.0), Method::S), Error);
  ConstructOptions o;
  o.epsilon = 0;
  CHECK_THROWS_AS(construct(f, VectorXd::Constant(1, 5.0), Method::S, o), Error);
}

TEST_CASE("LP hook sees the first LP with the sample rows") {
  const auto& f = coconut_function("conform1");
  VectorXd x0(2);
  x0 << 0.5, 0.5;
  ConstructOptions o;
  o.sample_size = 37;
  std::vector<int> rows;
  o.on_lp = [&](const LpBuild& b) { rows.push_back(b.lp.num_rows()); };
  const auto r = construct(f, x0, Method::D, o);
  if (!rows.empty()) {
    CHECK(rows.front() == 37 + 2 * 2 + 1);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i] == 2 * 2 + 1);
  }
  CHECK(r.report.lp_solves == static_cast<int>(rows.size()));
}

TEST_CASE("construction is deterministic") {
  const auto& f = coconut_function("ex8_1_4");
  VectorXd x0(2);
  x0 << 0.9, -0.4;
  ConstructOptions o;
  o.seed = 5;
  const auto a = construct(f, x0, Method::MS, o);
  const auto b = construct(f, x0, Method::MS, o);
  CHECK(a.report.outcome == b.report.outcome);
  CHECK(a.u.A == b.u.A);
  CHECK(a.u.gamma == b.u.gamma);
  CHECK(a.report.bound_trace == b.report.bound_trace);
}
