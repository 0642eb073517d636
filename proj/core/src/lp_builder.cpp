#include "quadue/lp_builder.hpp"

#include <algorithm>
#include <string>

#include "quadue/error.hpp"

namespace quadue {

namespace {

using linops::Sense;

// Coefficient of A(i, j) in q at x: 1/2 lambda_j z_i z_j.
Eigen::MatrixXd quad_coefficients(const QuadUnderestimator& u, const Eigen::VectorXd& x) {
  const Eigen::VectorXd z = eigen_coordinates(u, x);
  return 0.5 * (z * z.transpose()) * u.eig.lambda.asDiagonal();
}

}  // namespace

LpBuild build_lp(Method method, bool first_iteration, const QuadUnderestimator& incumbent,
                 const Eigen::VectorXd& x_star, double f_star, const LpSampleSet& samples, double epsilon) {
  if (!uses_lp(method)) throw Error(ErrorKind::InvalidArgument, "method has no parameter LP");
  const int n = incumbent.dim();
  const bool matrix = is_matrix(method);
  const bool shift = has_shift(method);

  LpLayout layout;
  layout.method = method;
  layout.n = n;
  layout.first = first_iteration;
  layout.a_index = Eigen::MatrixXi::Constant(n, n, -1);
  layout.s_index = Eigen::MatrixXi::Constant(n, n, -1);
  layout.t_index = Eigen::MatrixXi::Constant(n, n, -1);
  int nv = 0;
  if (matrix) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) layout.a_index(i, j) = nv++;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) layout.s_index(i, j) = nv++;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) layout.t_index(i, j) = nv++;
  } else {
    for (int i = 0; i < n; ++i) layout.a_index(i, i) = nv++;
  }
  if (shift) layout.gamma_index = nv++;

  LpBuild build{linops::LpInstance(nv), layout};
  linops::LpInstance& lp = build.lp;
  const Eigen::VectorXd& lam = incumbent.eig.lambda;
  const Eigen::MatrixXd& ak = incumbent.A;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (layout.a_index(i, j) >= 0) lp.set_var_name(layout.a_index(i, j), "A" + std::to_string(i + 1) + std::to_string(j + 1));
      if (layout.s_index(i, j) >= 0) lp.set_var_name(layout.s_index(i, j), "S" + std::to_string(i + 1) + std::to_string(j + 1));
      if (layout.t_index(i, j) >= 0) lp.set_var_name(layout.t_index(i, j), "T" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  if (shift) lp.set_var_name(layout.gamma_index, "gamma");

  auto quad_row = [&](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd c = quad_coefficients(incumbent, x);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (layout.a_index(i, j) >= 0) row[layout.a_index(i, j)] += c(i, j);
    if (shift) row[layout.gamma_index] = -1.0;
    return row;
  };
  auto bound_rhs = [&](const Eigen::VectorXd& x, double fx) {
    double r = fx - linear_eval(incumbent, x);
    if (!shift && r < 0.0 && r >= -epsilon) r = 0.0;
    return r;
  };

  // Objective: sum of q over the sample set, constants dropped.
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(nv);
  for (const auto& v : samples.points) obj += quad_row(v);
  if (shift) obj[layout.gamma_index] = -static_cast<double>(samples.points.size());
  lp.objective() = obj;

  lp.add_row(quad_row(x_star), Sense::LessEqual, bound_rhs(x_star, f_star), "q(x*)<=f(x*)");
  if (first_iteration) {
    for (std::size_t k = 0; k < samples.points.size(); ++k)
      lp.add_row(quad_row(samples.points[k]), Sense::LessEqual, bound_rhs(samples.points[k], samples.values[k]),
                 "q(v" + std::to_string(k) + ")<=f");
  }
  auto unit = [&](int var, double coef = 1.0) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
    r[var] = coef;
    return r;
  };
  for (int i = 0; i < n; ++i)
    lp.add_row(unit(layout.a_index(i, i)), Sense::LessEqual, ak(i, i), "A" + std::to_string(i + 1) + std::to_string(i + 1) + "<=Ak");
  if (matrix) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
        r[layout.a_index(i, j)] = lam[j];
        r[layout.a_index(j, i)] -= lam[i];
        lp.add_row(r, Sense::Equal, 0.0, "sym" + std::to_string(i + 1) + std::to_string(j + 1));
      }
  }
  for (int i = 0; i < n; ++i)
    lp.add_row(unit(layout.a_index(i, i)), Sense::GreaterEqual, 0.0, "A" + std::to_string(i + 1) + std::to_string(i + 1) + ">=0");
  if (method == Method::UDS) {
    for (int j = 1; j < n; ++j) {
      Eigen::VectorXd r = unit(layout.a_index(0, 0));
      r[layout.a_index(j, j)] -= 1.0;
      lp.add_row(r, Sense::Equal, 0.0, "tie1" + std::to_string(j + 1));
    }
  }
  if (matrix) {
    // Diagonal dominance of A Lambda.
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd r = unit(layout.a_index(i, i), lam[i]);
      for (int j = 0; j < n; ++j)
        if (j != i) r[layout.s_index(i, j)] = -1.0;
      lp.add_row(r, Sense::GreaterEqual, 0.0, "dom" + std::to_string(i + 1));
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Eigen::VectorXd r = unit(layout.a_index(i, j), lam[j]);
        r[layout.s_index(i, j)] = -1.0;
        lp.add_row(r, Sense::LessEqual, 0.0, "S+" + std::to_string(i + 1) + std::to_string(j + 1));
        r[layout.s_index(i, j)] = 1.0;
        lp.add_row(r, Sense::GreaterEqual, 0.0, "S-" + std::to_string(i + 1) + std::to_string(j + 1));
      }
    // Diagonal dominance of (A^k - A) Lambda.
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd r = unit(layout.a_index(i, i), -lam[i]);
      for (int j = 0; j < n; ++j)
        if (j != i) r[layout.t_index(i, j)] = -1.0;
      lp.add_row(r, Sense::GreaterEqual, -ak(i, i) * lam[i], "mono" + std::to_string(i + 1));
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Eigen::VectorXd r = unit(layout.a_index(i, j), -lam[j]);
        r[layout.t_index(i, j)] = -1.0;
        lp.add_row(r, Sense::LessEqual, -ak(i, j) * lam[j], "T+" + std::to_string(i + 1) + std::to_string(j + 1));
        r[layout.t_index(i, j)] = 1.0;
        lp.add_row(r, Sense::GreaterEqual, -ak(i, j) * lam[j], "T-" + std::to_string(i + 1) + std::to_string(j + 1));
      }
  }
  if (shift) lp.add_row(unit(layout.gamma_index), Sense::GreaterEqual, incumbent.gamma, "gamma>=gk");
  return build;
}

QuadUnderestimator apply_lp_solution(const LpBuild& build, const linops::LpSolution& sol,
                                     const QuadUnderestimator& incumbent) {
  if (sol.status != linops::LpStatus::Optimal) throw Error(ErrorKind::InvalidArgument, "LP solution is not optimal");
  const LpLayout& L = build.layout;
  const int n = L.n;
  QuadUnderestimator u = incumbent;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (L.a_index(i, j) >= 0) a(i, j) = sol.x[L.a_index(i, j)];
  const Eigen::VectorXd& lam = incumbent.eig.lambda;
  if (is_matrix(L.method)) {
    // Symmetrize A Lambda; entries multiplying a zero eigenvalue are inert.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double p = 0.5 * (a(i, j) * lam[j] + a(j, i) * lam[i]);
        a(i, j) = lam[j] > 0.0 ? p / lam[j] : 0.0;
        a(j, i) = lam[i] > 0.0 ? p / lam[i] : 0.0;
      }
  }
  for (int i = 0; i < n; ++i) a(i, i) = std::clamp(a(i, i), 0.0, incumbent.A(i, i));
  if (L.method == Method::UDS) a.diagonal().setConstant(a.diagonal().minCoeff());
  u.A = a;
  if (L.gamma_index >= 0) u.gamma = std::max(incumbent.gamma, sol.x[L.gamma_index]);
  return u;
}

}  // namespace quadue
