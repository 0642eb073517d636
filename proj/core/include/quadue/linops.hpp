#pragma once

// Dense symmetric eigendecomposition and a dense two-phase simplex solver.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quadue::linops {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct EigDecomp {
  Eigen::MatrixXd Q;       // columns are eigenvectors
  Eigen::VectorXd lambda;  // eigenvalues, descending

  Eigen::MatrixXd reconstruct() const { return Q * lambda.asDiagonal() * Q.transpose(); }
};

// Cyclic Jacobi. Throws NotSymmetric when |H - H^T| exceeds sym_tol.
EigDecomp sym_eig(const Eigen::MatrixXd& H, double sym_tol = 1e-10);

double min_eigenvalue(const Eigen::MatrixXd& H, double sym_tol = 1e-10);

// True iff the smallest eigenvalue is >= -tol.
bool psd_check(const Eigen::MatrixXd& H, double tol);

enum class Sense { LessEqual, Equal, GreaterEqual };

// maximize c.x subject to rows and lower <= x <= upper.
class LpInstance {
 public:
  explicit LpInstance(int num_vars);

  int num_vars() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  Eigen::VectorXd& objective() { return objective_; }
  const Eigen::VectorXd& objective() const { return objective_; }

  void set_bounds(int var, double lower, double upper);
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }

  // Returns the row index.
  int add_row(const Eigen::VectorXd& coeffs, Sense sense, double rhs, std::string label = {});

  const Eigen::VectorXd& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  Sense sense(int i) const { return senses_[static_cast<std::size_t>(i)]; }
  double rhs(int i) const { return rhs_[static_cast<std::size_t>(i)]; }
  const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i)]; }

  void set_var_name(int var, std::string name) { names_[static_cast<std::size_t>(var)] = std::move(name); }
  const std::string& var_name(int var) const { return names_[static_cast<std::size_t>(var)]; }

 private:
  Eigen::VectorXd objective_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::vector<std::string> names_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<Sense> senses_;
  std::vector<double> rhs_;
  std::vector<std::string> labels_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  // d(objective)/d(rhs_i) for every row of the instance.
  Eigen::VectorXd duals;
  std::int64_t pivots = 0;
};

struct LpOptions {
  std::int64_t max_pivots = 100000;
  double tolerance = 1e-9;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_run = 50;
};

// Throws IterationLimit past max_pivots, InvalidArgument on malformed input.
LpSolution solve_lp(const LpInstance& lp, const LpOptions& options = {});

// Plain-text listing of an instance, one row per line.
std::string dump_lp(const LpInstance& lp);

std::string_view to_string(LpStatus status);

}  // namespace quadue::linops
