#include <cmath>

#include "doctest.h"
#include "quadue/error.hpp"
#include "quadue/linops.hpp"
#include "quadue/sampling.hpp"

using namespace quadue;
using namespace quadue::linops;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("jacobi matches eigen on random symmetric matrices") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = 2 * rng.uniform() - 1;
    const MatrixXd h = a + a.transpose();
    const auto e = sym_eig(h);
    Eigen::SelfAdjointEigenSolver<MatrixXd> ref(h);
    for (int i = 0; i < n; ++i) CHECK(e.lambda[i] == doctest::Approx(ref.eigenvalues()[n - 1 - i]).epsilon(1e-10));
    CHECK((e.reconstruct() - h).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((e.Q.transpose() * e.Q - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("eigen helpers") {
  MatrixXd h(2, 2);
  h << 2, 1, 1, 2;
  CHECK(min_eigenvalue(h) == doctest::Approx(1));
  CHECK(psd_check(h, 0));
  h(0, 1) = 3;
  CHECK_THROWS_AS(sym_eig(h), Error);
  h << 1, 2, 2, 1;
  CHECK_FALSE(psd_check(h, 1e-9));
}

TEST_CASE("simplex on a textbook LP") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
  LpInstance lp(2);
  lp.objective() << 3, 5;
  lp.set_bounds(0, 0, kInf);
  lp.set_bounds(1, 0, kInf);
  lp.add_row((VectorXd(2) << 1, 0).finished(), Sense::LessEqual, 4);
  lp.add_row((VectorXd(2) << 0, 2).finished(), Sense::LessEqual, 12);
  lp.add_row((VectorXd(2) << 3, 2).finished(), Sense::LessEqual, 18);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(36));
  CHECK(s.x[0] == doctest::Approx(2));
  CHECK(s.x[1] == doctest::Approx(6));
  // Shadow prices 0, 1.5, 1.
  CHECK(s.duals[0] == doctest::Approx(0).epsilon(1e-9));
  CHECK(s.duals[1] == doctest::Approx(1.5));
  CHECK(s.duals[2] == doctest::Approx(1));
}

TEST_CASE("free variables, equalities and bounds") {
  // max -x - y  s.t. x + y = 1, x - y >= -3, x in [-5, 5], y free
  LpInstance lp(2);
  lp.objective() << -1, -2;
  lp.set_bounds(0, -5, 5);
  lp.set_bounds(1, -kInf, kInf);
  lp.add_row((VectorXd(2) << 1, 1).finished(), Sense::Equal, 1);
  lp.add_row((VectorXd(2) << 1, -1).finished(), Sense::GreaterEqual, -3);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(5));
  CHECK(s.x[1] == doctest::Approx(-4));
}

TEST_CASE("infeasible and unbounded") {
  LpInstance a(1);
  a.objective() << 1;
  a.set_bounds(0, 0, 1);
  a.add_row(VectorXd::Constant(1, 1.0), Sense::GreaterEqual, 2);
  CHECK(solve_lp(a).status == LpStatus::Infeasible);

  LpInstance b(1);
  b.objective() << 1;
  b.set_bounds(0, 0, kInf);
  b.add_row(VectorXd::Constant(1, -1.0), Sense::LessEqual, 0);
  CHECK(solve_lp(b).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate LP terminates") {
  // Many redundant constraints through the optimum.
  LpInstance lp(3);
  lp.objective() << 1, 1, 1;
  for (int j = 0; j < 3; ++j) lp.set_bounds(j, 0, kInf);
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    VectorXd a(3);
    for (int j = 0; j < 3; ++j) a[j] = 0.5 + rng.uniform();
    lp.add_row(a, Sense::LessEqual, 0.0);
  }
  lp.add_row(VectorXd::Ones(3), Sense::LessEqual, 1);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("dump lists every row") {
  LpInstance lp(1);
  lp.set_var_name(0, "alpha");
  lp.add_row(VectorXd::Constant(1, 1.0), Sense::LessEqual, 3, "cap");
  const auto text = dump_lp(lp);
  CHECK(text.find("alpha") != std::string::npos);
  CHECK(text.find("cap") != std::string::npos);
}
