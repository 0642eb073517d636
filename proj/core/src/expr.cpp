#include "quadue/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadue/error.hpp"

namespace quadue::expr {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double number = 0.0;
  int index = -1;
  int max_variable = -1;
  std::vector<Expr> children;
};

namespace {

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

[[noreturn]] void domain_violation(const std::string& what) {
  throw Error(ErrorKind::DomainViolation, what);
}

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Constant;
  node->number = value;
  node_ = std::move(node);
}

Expr Expr::variable(int index) {
  if (index < 0) throw Error(ErrorKind::InvalidArgument, "negative variable index");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Variable;
  node->index = index;
  node->max_variable = index;
  return Expr(std::move(node));
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  double constant = 0.0;
  for (auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& c : t.children()) {
        if (c.is_constant())
          constant += c.number();
        else
          flat.push_back(c);
      }
    } else if (t.is_constant()) {
      constant += t.number();
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (flat.empty()) return Expr(constant);
  if (constant != 0.0) flat.emplace_back(constant);
  if (flat.size() == 1) return flat.front();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Sum;
  for (const auto& c : flat) node->max_variable = std::max(node->max_variable, c.max_variable());
  node->children = std::move(flat);
  return Expr(std::move(node));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  double constant = 1.0;
  for (auto& f : factors) {
    if (f.kind() == Kind::Product) {
      for (const auto& c : f.children()) {
        if (c.is_constant())
          constant *= c.number();
        else
          flat.push_back(c);
      }
    } else if (f.is_constant()) {
      constant *= f.number();
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty() || constant == 0.0) return Expr(flat.empty() ? constant : 0.0);
  if (constant != 1.0) flat.insert(flat.begin(), Expr(constant));
  if (flat.size() == 1) return flat.front();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Product;
  for (const auto& c : flat) node->max_variable = std::max(node->max_variable, c.max_variable());
  node->children = std::move(flat);
  return Expr(std::move(node));
}

Expr Expr::quotient(Expr numerator, Expr denominator) {
  if (denominator.is_constant()) {
    if (std::abs(denominator.number()) < kDivisionGuard) domain_violation("division by zero constant");
    if (numerator.is_constant()) return Expr(numerator.number() / denominator.number());
    return product({Expr(1.0 / denominator.number()), std::move(numerator)});
  }
  if (numerator.is_zero()) return Expr(0.0);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Quotient;
  node->max_variable = std::max(numerator.max_variable(), denominator.max_variable());
  node->children = {std::move(numerator), std::move(denominator)};
  return Expr(std::move(node));
}

Expr Expr::power(Expr base, double exponent) {
  if (!std::isfinite(exponent)) throw Error(ErrorKind::InvalidArgument, "non-finite exponent");
  if (exponent == 0.0) return Expr(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    const double b = base.number();
    if (!is_integral(exponent) && b < 0.0) domain_violation("non-integer power of negative constant");
    if (exponent < 0.0 && std::abs(b) < kDivisionGuard) domain_violation("negative power of zero");
    return Expr(std::pow(b, exponent));
  }
  auto node = std::make_shared<Node>();
  node->kind = is_integral(exponent) ? Kind::IntPower : Kind::RealPower;
  node->number = exponent;
  node->max_variable = base.max_variable();
  node->children = {std::move(base)};
  return Expr(std::move(node));
}

Expr Expr::exp(Expr argument) {
  if (argument.is_constant()) return Expr(std::exp(argument.number()));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Exp;
  node->max_variable = argument.max_variable();
  node->children = {std::move(argument)};
  return Expr(std::move(node));
}

Expr Expr::log(Expr argument) {
  if (argument.is_constant()) {
    if (argument.number() <= 0.0) domain_violation("log of non-positive constant");
    return Expr(std::log(argument.number()));
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Log;
  node->max_variable = argument.max_variable();
  node->children = {std::move(argument)};
  return Expr(std::move(node));
}

Kind Expr::kind() const { return node_->kind; }
double Expr::number() const { return node_->number; }
int Expr::index() const { return node_->index; }
std::span<const Expr> Expr::children() const { return node_->children; }
int Expr::max_variable() const { return node_->max_variable; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1.0), a}); }
Expr pow(const Expr& base, double exponent) { return Expr::power(base, exponent); }
Expr exp(const Expr& a) { return Expr::exp(a); }
Expr log(const Expr& a) { return Expr::log(a); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind() || a.index() != b.index()) return false;
  if (a.number() != b.number()) return false;
  auto ca = a.children();
  auto cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!structurally_equal(ca[i], cb[i])) return false;
  return true;
}

Expr remap_variables(const Expr& e, std::span<const int> map) {
  switch (e.kind()) {
    case Kind::Constant:
      return e;
    case Kind::Variable:
      return Expr::variable(map[static_cast<std::size_t>(e.index())]);
    case Kind::Sum:
    case Kind::Product: {
      std::vector<Expr> ch;
      for (const auto& c : e.children()) ch.push_back(remap_variables(c, map));
      return e.kind() == Kind::Sum ? Expr::sum(std::move(ch)) : Expr::product(std::move(ch));
    }
    case Kind::Quotient:
      return Expr::quotient(remap_variables(e.children()[0], map), remap_variables(e.children()[1], map));
    case Kind::IntPower:
    case Kind::RealPower:
      return Expr::power(remap_variables(e.children()[0], map), e.number());
    case Kind::Exp:
      return Expr::exp(remap_variables(e.children()[0], map));
    case Kind::Log:
      return Expr::log(remap_variables(e.children()[0], map));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Point evaluation

namespace {

double checked_power(double base, double exponent, Kind kind) {
  if (kind == Kind::RealPower) {
    if (base < 0.0) domain_violation("non-integer power of negative base");
    if (base == 0.0 && exponent < 0.0) domain_violation("negative power of zero");
  } else if (exponent < 0.0 && std::abs(base) < kDivisionGuard) {
    domain_violation("negative power of zero");
  }
  return std::pow(base, exponent);
}

}  // namespace

double eval(const Expr& e, const Eigen::VectorXd& x) {
  switch (e.kind()) {
    case Kind::Constant:
      return e.number();
    case Kind::Variable:
      if (e.index() >= x.size()) throw Error(ErrorKind::InvalidArgument, "point dimension too small");
      return x[e.index()];
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& c : e.children()) s += eval(c, x);
      return s;
    }
    case Kind::Product: {
      double p = 1.0;
      for (const auto& c : e.children()) p *= eval(c, x);
      return p;
    }
    case Kind::Quotient: {
      const double d = eval(e.children()[1], x);
      if (std::abs(d) < kDivisionGuard) domain_violation("division by zero");
      return eval(e.children()[0], x) / d;
    }
    case Kind::IntPower:
    case Kind::RealPower:
      return checked_power(eval(e.children()[0], x), e.number(), e.kind());
    case Kind::Exp:
      return std::exp(eval(e.children()[0], x));
    case Kind::Log: {
      const double a = eval(e.children()[0], x);
      if (a <= 0.0) domain_violation("log of non-positive value");
      return std::log(a);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Forward-mode second-order jets

namespace {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

struct Jet {
  double v = 0.0;
  Vec g;
  Mat h;
};

Jet constant_jet(double v, int n) {
  Jet j;
  j.v = v;
  j.g = Vec::Zero(n);
  j.h = Mat::Zero(n, n);
  return j;
}

// phi(u) with phi' = d1, phi'' = d2.
void apply_unary(Jet& u, double value, double d1, double d2) {
  u.h = d1 * u.h + d2 * (u.g * u.g.transpose());
  u.g *= d1;
  u.v = value;
}

void multiply_into(Jet& acc, const Jet& w) {
  Mat cross = acc.g * w.g.transpose();
  acc.h = acc.v * w.h + w.v * acc.h + cross + cross.transpose();
  acc.g = acc.v * w.g + w.v * acc.g;
  acc.v *= w.v;
}

Jet jet(const Expr& e, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  switch (e.kind()) {
    case Kind::Constant:
      return constant_jet(e.number(), n);
    case Kind::Variable: {
      if (e.index() >= n) throw Error(ErrorKind::InvalidArgument, "point dimension too small");
      Jet j = constant_jet(x[e.index()], n);
      j.g[e.index()] = 1.0;
      return j;
    }
    case Kind::Sum: {
      Jet acc = constant_jet(0.0, n);
      for (const auto& c : e.children()) {
        Jet t = jet(c, x);
        acc.v += t.v;
        acc.g += t.g;
        acc.h += t.h;
      }
      return acc;
    }
    case Kind::Product: {
      auto ch = e.children();
      Jet acc = jet(ch[0], x);
      for (std::size_t i = 1; i < ch.size(); ++i) {
        if (ch[i].is_constant()) {
          const double c = ch[i].number();
          acc.v *= c;
          acc.g *= c;
          acc.h *= c;
        } else {
          multiply_into(acc, jet(ch[i], x));
        }
      }
      return acc;
    }
    case Kind::Quotient: {
      Jet num = jet(e.children()[0], x);
      Jet den = jet(e.children()[1], x);
      if (std::abs(den.v) < kDivisionGuard) domain_violation("division by zero");
      const double r = 1.0 / den.v;
      apply_unary(den, r, -r * r, 2.0 * r * r * r);
      multiply_into(num, den);
      return num;
    }
    case Kind::IntPower:
    case Kind::RealPower: {
      Jet u = jet(e.children()[0], x);
      const double p = e.number();
      const double b = u.v;
      if (e.kind() == Kind::RealPower && b <= 0.0) domain_violation("non-integer power of non-positive base");
      if (e.kind() == Kind::IntPower && p < 0.0 && std::abs(b) < kDivisionGuard)
        domain_violation("negative power of zero");
      apply_unary(u, std::pow(b, p), p * std::pow(b, p - 1.0), p * (p - 1.0) * std::pow(b, p - 2.0));
      return u;
    }
    case Kind::Exp: {
      Jet u = jet(e.children()[0], x);
      const double v = std::exp(u.v);
      apply_unary(u, v, v, v);
      return u;
    }
    case Kind::Log: {
      Jet u = jet(e.children()[0], x);
      if (u.v <= 0.0) domain_violation("log of non-positive value");
      const double r = 1.0 / u.v;
      apply_unary(u, std::log(u.v), r, -r * r);
      return u;
    }
  }
  return constant_jet(0.0, n);
}

}  // namespace

SecondOrder eval_second_order(const Expr& e, const Eigen::VectorXd& x) {
  if (x.size() > kMaxDim) throw Error(ErrorKind::DimensionTooLarge, "jet capacity exceeded");
  Jet j = jet(e, x);
  SecondOrder out;
  out.value = j.v;
  out.grad = j.g;
  // Symmetric by construction up to rounding in the cross terms.
  out.hess = 0.5 * (j.h + j.h.transpose());
  return out;
}

Eigen::VectorXd grad(const Expr& e, const Eigen::VectorXd& x) { return eval_second_order(e, x).grad; }

Eigen::MatrixXd hessian(const Expr& e, const Eigen::VectorXd& x) { return eval_second_order(e, x).hess; }

// ---------------------------------------------------------------------------
// Interval evaluation

namespace {

Interval hull(std::initializer_list<double> values) {
  auto [lo, hi] = std::minmax(values);
  return {lo, hi};
}

Interval int_power(Interval u, int p) {
  if (p >= 0) {
    if (p % 2 == 1) return {std::pow(u.lo, p), std::pow(u.hi, p)};
    const double a = std::pow(u.lo, p);
    const double b = std::pow(u.hi, p);
    if (u.lo <= 0.0 && u.hi >= 0.0) return {0.0, std::max(a, b)};
    return hull({a, b});
  }
  // Caller guarantees 0 is not in u.
  Interval pos = int_power(u, -p);
  return hull({1.0 / pos.lo, 1.0 / pos.hi});
}

struct Guarded {
  Interval iv;
  bool ok = true;
};

Guarded interval(const Expr& e, std::span<const Interval> box) {
  switch (e.kind()) {
    case Kind::Constant:
      return {{e.number(), e.number()}, true};
    case Kind::Variable:
      if (static_cast<std::size_t>(e.index()) >= box.size())
        throw Error(ErrorKind::InvalidArgument, "box dimension too small");
      return {box[e.index()], true};
    case Kind::Sum: {
      Guarded acc{{0.0, 0.0}, true};
      for (const auto& c : e.children()) {
        Guarded t = interval(c, box);
        acc.iv.lo += t.iv.lo;
        acc.iv.hi += t.iv.hi;
        acc.ok = acc.ok && t.ok;
      }
      return acc;
    }
    case Kind::Product: {
      Guarded acc{{1.0, 1.0}, true};
      for (const auto& c : e.children()) {
        Guarded t = interval(c, box);
        acc.iv = hull({acc.iv.lo * t.iv.lo, acc.iv.lo * t.iv.hi, acc.iv.hi * t.iv.lo, acc.iv.hi * t.iv.hi});
        acc.ok = acc.ok && t.ok;
      }
      return acc;
    }
    case Kind::Quotient: {
      Guarded num = interval(e.children()[0], box);
      Guarded den = interval(e.children()[1], box);
      bool ok = num.ok && den.ok;
      if (den.iv.lo < kDivisionGuard && den.iv.hi > -kDivisionGuard) {
        return {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}, false};
      }
      Interval r = hull({1.0 / den.iv.lo, 1.0 / den.iv.hi});
      return {hull({num.iv.lo * r.lo, num.iv.lo * r.hi, num.iv.hi * r.lo, num.iv.hi * r.hi}), ok};
    }
    case Kind::IntPower: {
      Guarded u = interval(e.children()[0], box);
      const int p = static_cast<int>(e.number());
      if (p < 0 && u.iv.lo < kDivisionGuard && u.iv.hi > -kDivisionGuard) {
        return {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}, false};
      }
      return {int_power(u.iv, p), u.ok};
    }
    case Kind::RealPower: {
      Guarded u = interval(e.children()[0], box);
      if (u.iv.lo <= 0.0) {
        return {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}, false};
      }
      const double p = e.number();
      return {hull({std::pow(u.iv.lo, p), std::pow(u.iv.hi, p)}), u.ok};
    }
    case Kind::Exp: {
      Guarded u = interval(e.children()[0], box);
      return {{std::exp(u.iv.lo), std::exp(u.iv.hi)}, u.ok};
    }
    case Kind::Log: {
      Guarded u = interval(e.children()[0], box);
      if (u.iv.lo <= 0.0) {
        return {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}, false};
      }
      return {{std::log(u.iv.lo), std::log(u.iv.hi)}, u.ok};
    }
  }
  return {{0.0, 0.0}, true};
}

}  // namespace

IntervalResult eval_interval(const Expr& e, std::span<const Interval> box) {
  Guarded g = interval(e, box);
  return {g.iv, g.ok};
}

void check_domain(const Expr& e, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = static_cast<int>(lower.size());
  if (e.max_variable() >= n) throw Error(ErrorKind::InvalidArgument, "expression uses variable outside the box");
  constexpr int kBudget = 1 << 14;
  std::vector<std::vector<Interval>> stack;
  std::vector<Interval> root(n);
  for (int i = 0; i < n; ++i) root[i] = {lower[i], upper[i]};
  stack.push_back(std::move(root));
  int processed = 0;
  while (!stack.empty()) {
    std::vector<Interval> box = std::move(stack.back());
    stack.pop_back();
    if (interval(e, box).ok) continue;
    // A concrete breach anywhere is conclusive.
    Eigen::VectorXd mid(n);
    for (int i = 0; i < n; ++i) mid[i] = 0.5 * (box[i].lo + box[i].hi);
    (void)eval(e, mid);
    if (++processed > kBudget) domain_violation("could not verify domain guards on the box");
    int widest = 0;
    for (int i = 1; i < n; ++i)
      if (box[i].hi - box[i].lo > box[widest].hi - box[widest].lo) widest = i;
    if (n == 0 || box[widest].hi - box[widest].lo < 1e-12) {
      // Degenerate sub-box at a guard boundary: check its corners directly.
      Eigen::VectorXd corner(n);
      for (int i = 0; i < n; ++i) corner[i] = box[i].lo;
      (void)eval(e, corner);
      for (int i = 0; i < n; ++i) corner[i] = box[i].hi;
      (void)eval(e, corner);
      domain_violation("guard boundary touches the box");
    }
    std::vector<Interval> left = box;
    std::vector<Interval> right = box;
    const double split = 0.5 * (box[widest].lo + box[widest].hi);
    left[widest].hi = split;
    right[widest].lo = split;
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
}

}  // namespace quadue::expr
