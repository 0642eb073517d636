#include "quadue/underestimator.hpp"

#include <cmath>

#include <json.hpp>

#include "quadue/error.hpp"
#include "quadue/expr.hpp"

namespace quadue {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::S: return "S";
    case Method::SS: return "SS";
    case Method::UDS: return "UDS";
    case Method::D: return "D";
    case Method::DS: return "DS";
    case Method::M: return "M";
    case Method::MS: return "MS";
  }
  return "?";
}

Method parse_method(std::string_view tag) {
  for (Method m : kAllMethods)
    if (to_string(m) == tag) return m;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(tag) + "'");
}

Eigen::MatrixXd QuadUnderestimator::scaled_spectrum() const {
  const Eigen::MatrixXd p = A * eig.lambda.asDiagonal();
  return 0.5 * (p + p.transpose());
}

Eigen::MatrixXd QuadUnderestimator::curvature() const { return eig.Q * scaled_spectrum() * eig.Q.transpose(); }

namespace {

// Writes z = Q'(x - x0) into a stack buffer; n <= kMaxDim.
void coords(const QuadUnderestimator& u, const Eigen::VectorXd& x, double* d, double* z) {
  const int n = u.dim();
  for (int i = 0; i < n; ++i) d[i] = x[i] - u.x0[i];
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u.eig.Q(i, j) * d[i];
    z[j] = s;
  }
}

}  // namespace

Eigen::VectorXd eigen_coordinates(const QuadUnderestimator& u, const Eigen::VectorXd& x) {
  return u.eig.Q.transpose() * (x - u.x0);
}

double linear_eval(const QuadUnderestimator& u, const Eigen::VectorXd& x) {
  double v = u.f0;
  for (int i = 0; i < u.dim(); ++i) v += u.grad0[i] * (x[i] - u.x0[i]);
  return v;
}

double q_eval(const QuadUnderestimator& u, const Eigen::VectorXd& x) {
  const int n = u.dim();
  double d[expr::kMaxDim], z[expr::kMaxDim];
  coords(u, x, d, z);
  double lin = u.f0;
  for (int i = 0; i < n; ++i) lin += u.grad0[i] * d[i];
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double p = 0.5 * (u.A(i, j) * u.eig.lambda[j] + u.A(j, i) * u.eig.lambda[i]);
      quad += p * z[i] * z[j];
    }
  }
  return lin + 0.5 * quad - u.gamma;
}

Eigen::VectorXd q_grad(const QuadUnderestimator& u, const Eigen::VectorXd& x) {
  return u.grad0 + u.curvature() * (x - u.x0);
}

double curvature_form(const QuadUnderestimator& u, const Eigen::VectorXd& x) {
  double d[expr::kMaxDim], z[expr::kMaxDim];
  coords(u, x, d, z);
  double s = 0.0;
  for (int i = 0; i < u.dim(); ++i) s += u.eig.lambda[i] * z[i] * z[i];
  return s;
}

LocalConvexity check_local_convexity(const DcFunction& f, const Eigen::VectorXd& x0, double tol) {
  if (!f.box().contains(x0)) throw Error(ErrorKind::InvalidArgument, "point of construction outside the box");
  const expr::SecondOrder so = f.second_order(x0);
  LocalConvexity out;
  out.f0 = so.value;
  out.grad0 = so.grad;
  out.eig = linops::sym_eig(so.hess, 1e-8 * (1.0 + so.hess.cwiseAbs().maxCoeff()));
  out.min_eigenvalue = out.eig.lambda[out.eig.lambda.size() - 1];
  out.convex = out.min_eigenvalue >= -tol;
  return out;
}

QuadUnderestimator make_underestimator(const LocalConvexity& lc, const Eigen::VectorXd& x0, Method method, double alpha) {
  if (!lc.convex) throw Error(ErrorKind::InvalidArgument, "Hessian at the point of construction is not PSD");
  QuadUnderestimator u;
  u.method = method;
  u.x0 = x0;
  u.f0 = lc.f0;
  u.grad0 = lc.grad0;
  u.eig = lc.eig;
  u.eig.lambda = u.eig.lambda.cwiseMax(0.0);
  u.A = alpha * Eigen::MatrixXd::Identity(x0.size(), x0.size());
  return u;
}

double update_scalar(const QuadUnderestimator& u, const Eigen::VectorXd& x_star, double f_star) {
  const double den = curvature_form(u, x_star);
  if (std::abs(den) < 1e-14) throw Error(ErrorKind::DegenerateCurvature, "curvature along x* - x0 vanishes");
  return 2.0 * (f_star - linear_eval(u, x_star)) / den;
}

double update_shift_scalar(const QuadUnderestimator& u, const Eigen::VectorXd& x_star, double f_star) {
  return linear_eval(u, x_star) - f_star;
}

std::string to_json(const QuadUnderestimator& u) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  auto mat = [&](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
    return rows;
  };
  nlohmann::json j;
  j["method"] = std::string(to_string(u.method));
  j["x0"] = vec(u.x0);
  j["f0"] = u.f0;
  j["gradient"] = vec(u.grad0);
  j["hessian"] = mat(u.curvature());
  j["A"] = mat(u.A);
  j["eigenvalues"] = vec(u.eig.lambda);
  j["gamma"] = u.gamma;
  j["converged"] = u.converged;
  return j.dump(2);
}

}  // namespace quadue
