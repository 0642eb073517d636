#pragma once

// Box domains and difference-of-convex functions f = h - g over them.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadue/expr.hpp"

namespace quadue {

class BoxDomain {
 public:
  // Throws InvalidArgument unless lower[i] < upper[i] for every i.
  BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper);

  // [lo, hi]^n
  static BoxDomain cube(int n, double lo, double hi);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }
  Eigen::VectorXd width() const { return upper_ - lower_; }
  double volume() const { return width().prod(); }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
  std::vector<expr::Interval> intervals() const;

  // The 2^n corners; bit i of the index selects upper[i].
  std::vector<Eigen::VectorXd> corners() const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

class DcFunction {
 public:
  // Verifies variable indices and the domain guards of h and g on the box.
  DcFunction(std::string name, expr::Expr h, expr::Expr g, BoxDomain box);

  const std::string& name() const { return name_; }
  const expr::Expr& h() const { return h_; }
  const expr::Expr& g() const { return g_; }
  const BoxDomain& box() const { return box_; }
  int dim() const { return box_.dim(); }
  bool convex() const { return g_.is_zero(); }

  // Range-scale factor applied by scale_range, if any.
  std::optional<double> scale() const { return scale_; }

  double value(const Eigen::VectorXd& x) const { return eval_h(x) - eval_g(x); }
  double eval_h(const Eigen::VectorXd& x) const { return expr::eval(h_, x); }
  double eval_g(const Eigen::VectorXd& x) const { return g_.is_zero() ? 0.0 : expr::eval(g_, x); }

  // Value, gradient and Hessian of f = h - g.
  expr::SecondOrder second_order(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  // Same function with h and g multiplied by s > 0; records s.
  DcFunction scaled(double s) const;

 private:
  std::string name_;
  expr::Expr h_;
  expr::Expr g_;
  BoxDomain box_;
  std::optional<double> scale_;
};

struct RangeEstimate {
  double min = 0.0;
  double max = 0.0;
  Eigen::VectorXd argmin;
  Eigen::VectorXd argmax;
};

// 512 points per dimension for n <= 2, 64 otherwise.
int default_range_density(int n);

// Grid scan including the box faces, then projected-gradient polish of the
// best grid points. Throws InvalidArgument when grid_density < 16.
RangeEstimate estimate_range(const DcFunction& f, int grid_density);

// f scaled by 1/max(|min f|, |max f|). Throws DegenerateRange below 1e-12.
DcFunction scale_range(const DcFunction& f, int grid_density);

}  // namespace quadue
