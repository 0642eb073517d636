#pragma once

// Immutable expression trees over R^n with exact value, gradient and Hessian
// evaluation (forward mode), interval bounds and domain-guard verification.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace quadue::expr {

// Jets carry dense tangents of this capacity; every study here has n <= 4.
inline constexpr int kMaxDim = 8;

// Division by a value smaller than this is treated as a domain violation.
inline constexpr double kDivisionGuard = 1e-12;

enum class Kind { Constant, Variable, Sum, Product, Quotient, IntPower, RealPower, Exp, Log };

class Expr {
 public:
  Expr();  // constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor): numeric literals in builders

  static Expr variable(int index);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr quotient(Expr numerator, Expr denominator);
  static Expr power(Expr base, double exponent);
  static Expr exp(Expr argument);
  static Expr log(Expr argument);

  Kind kind() const;
  // Constant value for Kind::Constant, exponent for the power kinds.
  double number() const;
  int index() const;
  std::span<const Expr> children() const;

  // Largest variable index referenced, or -1 for a variable-free tree.
  int max_variable() const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero() const { return is_constant() && number() == 0.0; }

  // Identity of the shared node, used for structural equality shortcuts.
  const void* id() const { return node_.get(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);

bool structurally_equal(const Expr& a, const Expr& b);

// Copy of e with variable i replaced by variable map[i].
Expr remap_variables(const Expr& e, std::span<const int> map);

// Throws Error(DomainViolation) on log of a non-positive value, division by
// |d| < kDivisionGuard, or a non-integer power of a negative base.
double eval(const Expr& e, const Eigen::VectorXd& x);

struct SecondOrder {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// Value, gradient and Hessian in one forward sweep. x.size() <= kMaxDim.
SecondOrder eval_second_order(const Expr& e, const Eigen::VectorXd& x);
Eigen::VectorXd grad(const Expr& e, const Eigen::VectorXd& x);
Eigen::MatrixXd hessian(const Expr& e, const Eigen::VectorXd& x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntervalResult {
  Interval range;
  // False when some guard could not be proven to hold on the whole box.
  bool guards_hold = true;
};

IntervalResult eval_interval(const Expr& e, std::span<const Interval> box);

// Proves the guards hold on [lower, upper] by interval evaluation with
// adaptive bisection. Throws Error(DomainViolation) when a guard is breached
// at a sampled point or cannot be verified within the subdivision budget.
void check_domain(const Expr& e, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

// Text form: infix, '^' for powers, exp(), log(), variables x1..xn.
Expr parse(std::string_view text);
std::string to_string(const Expr& e);

// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

}  // namespace quadue::expr
