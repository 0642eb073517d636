#include <cmath>

#include "doctest.h"
#include "quadue/error.hpp"
#include "quadue/expr.hpp"

using namespace quadue;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

// Central differences of the analytic gradient.
Eigen::MatrixXd fd_hessian(const expr::Expr& e, const VectorXd& x, double h = 1e-5) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) {
    VectorXd a = x, b = x;
    a[j] += h;
    b[j] -= h;
    out.col(j) = (expr::grad(e, a) - expr::grad(e, b)) / (2 * h);
  }
  return out;
}

VectorXd fd_grad(const expr::Expr& e, const VectorXd& x, double h = 1e-6) {
  VectorXd g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    VectorXd a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (expr::eval(e, a) - expr::eval(e, b)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("parse and evaluate") {
  const auto e = expr::parse("3*x1^2 - 2*x1*x2 + exp(0.5*x2) - log(x1 + 4) + (x1 + x2)^4/8");
  const VectorXd x = vec({0.3, -0.7});
  const double want = 3 * 0.09 - 2 * 0.3 * -0.7 + std::exp(-0.35) - std::log(4.3) + std::pow(-0.4, 4) / 8;
  CHECK(expr::eval(e, x) == doctest::Approx(want).epsilon(1e-14));
  CHECK(e.max_variable() == 1);
}

TEST_CASE("unary minus, precedence and right-associative powers") {
  CHECK(expr::eval(expr::parse("-x1^2"), vec({3})) == doctest::Approx(-9));
  CHECK(expr::eval(expr::parse("2^3^2"), vec({0})) == doctest::Approx(512));
  CHECK(expr::eval(expr::parse("1 - 2 - 3"), vec({0})) == doctest::Approx(-4));
  CHECK(expr::eval(expr::parse("8/2/2"), vec({0})) == doctest::Approx(2));
}

TEST_CASE("gradient and hessian match finite differences") {
  const char* texts[] = {
      "x1^6 + 27*x1^2 - 15*x1^4",
      "exp(2.35*x1) + exp(-2.35*x2) + 0.125*(x1 + x2)^4",
      "-(0.614*(0.909*x1 + 1) + 0.743*(0.909*x2 + 1))^0.75",
      "(x1 - 2*x2 + 3)^-2 + x1*x2*x3",
      "log(x1 + x2 + 5)*exp(0.5*(x1 - x3)^2)",
  };
  const VectorXd x = vec({0.21, -0.43, 0.37});
  for (const char* t : texts) {
    CAPTURE(t);
    const auto e = expr::parse(t);
    const auto so = expr::eval_second_order(e, x);
    CHECK(so.value == doctest::Approx(expr::eval(e, x)));
    CHECK((so.grad - fd_grad(e, x)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((so.hess - fd_hessian(e, x)).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((so.hess - so.hess.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("text round trip") {
  const auto e = expr::parse("0.1*x1^3 - exp(-4*x2) / (x1 + 3) + log(2.5 + x2)^2");
  const auto back = expr::parse(expr::to_string(e));
  const VectorXd x = vec({0.4, 0.9});
  CHECK(expr::eval(back, x) == expr::eval(e, x));
  CHECK(expr::format_number(0.1) == "0.1");
  CHECK(std::stod(expr::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("domain guards") {
  CHECK_THROWS_AS(expr::eval(expr::parse("log(x1)"), vec({-1})), Error);
  CHECK_THROWS_AS(expr::eval(expr::parse("1/x1"), vec({0})), Error);
  CHECK_THROWS_AS(expr::eval(expr::parse("x1^0.5"), vec({-0.1})), Error);
  CHECK_NOTHROW(expr::check_domain(expr::parse("log(x1 + 2)"), vec({-1}), vec({1})));
  CHECK_THROWS_AS(expr::check_domain(expr::parse("log(x1 + 0.5)"), vec({-1}), vec({1})), Error);
}

TEST_CASE("interval bounds enclose sampled values") {
  const auto e = expr::parse("x1^3 - 2*x1*x2 + exp(x2)");
  const expr::Interval box[2] = {{-1, 2}, {-0.5, 0.5}};
  const auto r = expr::eval_interval(e, box);
  for (double a = -1; a <= 2; a += 0.25)
    for (double b = -0.5; b <= 0.5; b += 0.125) {
      const double v = expr::eval(e, vec({a, b}));
      CHECK(v >= r.range.lo - 1e-12);
      CHECK(v <= r.range.hi + 1e-12);
    }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(expr::parse("x1 +"), Error);
  CHECK_THROWS_AS(expr::parse("foo(x1)"), Error);
  CHECK_THROWS_AS(expr::parse("x0"), Error);
  CHECK_THROWS_AS(expr::parse("(x1"), Error);
}

TEST_CASE("remap variables") {
  const auto e = expr::parse("x1 + 2*x2");
  const int map[2] = {1, 0};
  CHECK(expr::eval(expr::remap_variables(e, map), vec({10, 1})) == doctest::Approx(21));
}
