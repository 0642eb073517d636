#pragma once

// Convex quadratic underestimators of the form
//   q(x) = f(x0) + grad f(x0).(x - x0) + 1/2 (x - x0)' Q A Lambda Q' (x - x0) - gamma
// where Q Lambda Q' is the Hessian of f at x0.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "quadue/dc_function.hpp"
#include "quadue/linops.hpp"

namespace quadue {

enum class Method { S, SS, UDS, D, DS, M, MS };

inline constexpr std::array<Method, 7> kAllMethods = {Method::S, Method::D, Method::M, Method::SS,
                                                      Method::UDS, Method::DS, Method::MS};

std::string_view to_string(Method m);
// Throws InvalidArgument for an unknown tag.
Method parse_method(std::string_view tag);

inline bool has_shift(Method m) { return m == Method::SS || m == Method::UDS || m == Method::DS || m == Method::MS; }
inline bool uses_lp(Method m) { return m != Method::S && m != Method::SS; }
inline bool is_matrix(Method m) { return m == Method::M || m == Method::MS; }

struct QuadUnderestimator {
  Method method = Method::S;
  Eigen::VectorXd x0;
  double f0 = 0.0;
  Eigen::VectorXd grad0;
  linops::EigDecomp eig;  // eigenvalues clamped at 0 from below
  Eigen::MatrixXd A;
  double gamma = 0.0;
  bool converged = false;

  int dim() const { return static_cast<int>(x0.size()); }
  // A Lambda, symmetrized.
  Eigen::MatrixXd scaled_spectrum() const;
  // Q (A Lambda) Q', the Hessian of q.
  Eigen::MatrixXd curvature() const;
  // Scalar methods keep A = alpha I.
  double alpha() const { return A(0, 0); }
};

// Coordinates of x - x0 in the eigenbasis.
Eigen::VectorXd eigen_coordinates(const QuadUnderestimator& u, const Eigen::VectorXd& x);

double q_eval(const QuadUnderestimator& u, const Eigen::VectorXd& x);
Eigen::VectorXd q_grad(const QuadUnderestimator& u, const Eigen::VectorXd& x);
// First-order Taylor value at x (A = 0, gamma = 0).
double linear_eval(const QuadUnderestimator& u, const Eigen::VectorXd& x);
// (x - x0)' H (x - x0) with H the (clamped) Hessian at x0.
double curvature_form(const QuadUnderestimator& u, const Eigen::VectorXd& x);

struct LocalConvexity {
  bool convex = false;
  double min_eigenvalue = 0.0;
  double f0 = 0.0;
  Eigen::VectorXd grad0;
  linops::EigDecomp eig;
};

// Hessian PSD test at x0 (min eigenvalue >= -tol). Throws InvalidArgument
// when x0 lies outside the box.
LocalConvexity check_local_convexity(const DcFunction& f, const Eigen::VectorXd& x0, double tol = 1e-9);

// A = alpha I, gamma = 0. Requires lc.convex.
QuadUnderestimator make_underestimator(const LocalConvexity& lc, const Eigen::VectorXd& x0, Method method,
                                       double alpha = 1.0);

// Scaling ratio 2 (f(x*) - l(x*)) / (x* - x0)' H (x* - x0), the largest alpha
// with q(x*) <= f(x*). Throws DegenerateCurvature when the denominator is
// below 1e-14 in magnitude.
double update_scalar(const QuadUnderestimator& u, const Eigen::VectorXd& x_star, double f_star);

// Shift l(x*) - f(x*) restoring q(x*) = f(x*) with alpha = 0.
double update_shift_scalar(const QuadUnderestimator& u, const Eigen::VectorXd& x_star, double f_star);

// JSON record: method, x0, f0, gradient, Hessian of q, A, gamma, convergence.
std::string to_json(const QuadUnderestimator& u);

}  // namespace quadue
