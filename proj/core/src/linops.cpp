#include "quadue/linops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "quadue/error.hpp"
#include "quadue/expr.hpp"

namespace quadue::linops {

// ---------------------------------------------------------------------------
// Eigen decomposition

EigDecomp sym_eig(const Eigen::MatrixXd& H, double sym_tol) {
  const Eigen::Index n = H.rows();
  if (H.cols() != n) throw Error(ErrorKind::NotSymmetric, "matrix is not square");
  if (n > 0 && (H - H.transpose()).cwiseAbs().maxCoeff() > sym_tol)
    throw Error(ErrorKind::NotSymmetric, "asymmetry exceeds tolerance");

  Eigen::MatrixXd a = 0.5 * (H + H.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-16 * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        // Rotation zeroing a(p,q); see Golub & Van Loan, sym.schur2.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  EigDecomp out;
  out.Q.resize(n, n);
  out.lambda.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.lambda[k] = a(src, src);
    out.Q.col(k) = v.col(src);
  }
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& H, double sym_tol) {
  const EigDecomp e = sym_eig(H, sym_tol);
  return e.lambda.size() == 0 ? 0.0 : e.lambda[e.lambda.size() - 1];
}

bool psd_check(const Eigen::MatrixXd& H, double tol) {
  if (tol < 0.0) throw Error(ErrorKind::InvalidArgument, "psd tolerance must be nonnegative");
  return min_eigenvalue(H) >= -tol;
}

// ---------------------------------------------------------------------------
// LP instance

LpInstance::LpInstance(int num_vars)
    : objective_(Eigen::VectorXd::Zero(num_vars)),
      lower_(Eigen::VectorXd::Constant(num_vars, -kInf)),
      upper_(Eigen::VectorXd::Constant(num_vars, kInf)),
      names_(static_cast<std::size_t>(num_vars)) {
  for (int j = 0; j < num_vars; ++j) names_[static_cast<std::size_t>(j)] = "v" + std::to_string(j);
}

void LpInstance::set_bounds(int var, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper)) throw Error(ErrorKind::InvalidArgument, "NaN variable bound");
  lower_[var] = lower;
  upper_[var] = upper;
}

int LpInstance::add_row(const Eigen::VectorXd& coeffs, Sense sense, double rhs, std::string label) {
  if (coeffs.size() != objective_.size()) throw Error(ErrorKind::InvalidArgument, "row width differs from variable count");
  if (coeffs.hasNaN() || std::isnan(rhs)) throw Error(ErrorKind::InvalidArgument, "NaN in LP row");
  rows_.push_back(coeffs);
  senses_.push_back(sense);
  rhs_.push_back(rhs);
  labels_.push_back(std::move(label));
  return num_rows() - 1;
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Simplex

namespace {

enum class VarMap { Shift, Negate, Split };

struct Column {
  VarMap map;
  int first = 0;  // standard-form column
  double offset = 0.0;
};

struct StdRow {
  Eigen::VectorXd a;
  double b = 0.0;
  int origin = -1;     // instance row, -1 for a bound row
  double sign = 1.0;   // d(b_std)/d(b_orig)
};

class Tableau {
 public:
  Tableau(const std::vector<StdRow>& rows, int structural, const LpOptions& options)
      : m_(static_cast<int>(rows.size())), ns_(structural), opt_(options) {
    int artificials = 0;
    for (const auto& r : rows) artificials += r.b < 0.0 ? 1 : 0;
    na_ = artificials;
    cols_ = ns_ + m_ + na_;
    t_.setZero(m_ + 1, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    int art = 0;
    for (int i = 0; i < m_; ++i) {
      const StdRow& r = rows[static_cast<std::size_t>(i)];
      const double flip = r.b < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(ns_) = flip * r.a.transpose();
      t_(i, ns_ + i) = flip;
      t_(i, cols_) = flip * r.b;
      if (r.b < 0.0) {
        const int col = ns_ + m_ + art++;
        t_(i, col) = 1.0;
        basis_[static_cast<std::size_t>(i)] = col;
      } else {
        basis_[static_cast<std::size_t>(i)] = ns_ + i;
      }
    }
  }

  // Returns false when the phase-1 optimum leaves artificials positive.
  bool phase_one(std::int64_t& pivots) {
    if (na_ == 0) return true;
    auto obj = t_.row(m_);
    obj.setZero();
    obj.segment(ns_ + m_, na_).setOnes();
    for (int i = 0; i < m_; ++i)
      if (is_artificial(basis_[static_cast<std::size_t>(i)])) obj -= t_.row(i);
    if (iterate(pivots, cols_) == Outcome::Unbounded) return false;  // cannot happen: bounded by 0
    double bscale = 1.0;
    for (int i = 0; i < m_; ++i) bscale = std::max(bscale, std::abs(t_(i, cols_)));
    if (-t_(m_, cols_) > 1e-8 * bscale) return false;
    // Drive zero-level artificials out of the basis where possible.
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      int best = -1;
      double mag = 1e-9;
      for (int j = 0; j < ns_ + m_; ++j) {
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
    return true;
  }

  // Maximizes c over structural columns; returns false when unbounded.
  bool phase_two(const Eigen::VectorXd& c, std::int64_t& pivots) {
    auto obj = t_.row(m_);
    obj.setZero();
    obj.head(ns_) = -c.transpose();
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b < ns_ && c[b] != 0.0) obj += c[b] * t_.row(i);
    }
    return iterate(pivots, ns_ + m_) == Outcome::Optimal;
  }

  Eigen::VectorXd structural_values() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(ns_);
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b < ns_) y[b] = t_(i, cols_);
    }
    return y;
  }

  double slack_dual(int row) const { return t_(m_, ns_ + row); }

 private:
  enum class Outcome { Optimal, Unbounded };

  bool is_artificial(int col) const { return col >= ns_ + m_; }

  Outcome iterate(std::int64_t& pivots, int allowed) {
    const double tol = opt_.tolerance;
    bool bland = false;
    int degenerate = 0;
    for (;;) {
      int enter = -1;
      double best = -tol;
      for (int j = 0; j < allowed; ++j) {
        const double d = t_(m_, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      int leave = -1;
      double ratio = kInf;
      for (int i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= tol) continue;
        const double r = std::max(t_(i, cols_), 0.0) / a;
        if (leave < 0 || r < ratio - 1e-12 * (1.0 + ratio)) {
          leave = i;
          ratio = r;
        } else if (r <= ratio + 1e-12 * (1.0 + ratio)) {
          const bool take = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                                  : a > t_(leave, enter);
          if (take) {
            leave = i;
            ratio = std::min(ratio, r);
          }
        }
      }
      if (leave < 0) return Outcome::Unbounded;

      if (++pivots > opt_.max_pivots)
        throw Error(ErrorKind::IterationLimit, "simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
      if (ratio <= tol) {
        if (++degenerate >= opt_.degenerate_run) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      pivot(leave, enter);
    }
  }

  void pivot(int r, int e) {
    t_.row(r) /= t_(r, e);
    const Eigen::RowVectorXd pr = t_.row(r);
    Eigen::VectorXd col = t_.col(e);
    col[r] = 0.0;
    t_.noalias() -= col * pr;
    basis_[static_cast<std::size_t>(r)] = e;
  }

  int m_;
  int ns_;
  int na_ = 0;
  int cols_ = 0;
  LpOptions opt_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LpInstance& lp, const LpOptions& options) {
  const int n = lp.num_vars();
  if (lp.objective().hasNaN()) throw Error(ErrorKind::InvalidArgument, "NaN objective coefficient");

  // Map every variable onto nonnegative standard-form columns.
  std::vector<Column> cols(static_cast<std::size_t>(n));
  int ns = 0;
  for (int j = 0; j < n; ++j) {
    const double l = lp.lower(j);
    const double u = lp.upper(j);
    if (l > u) {
      LpSolution out;
      out.status = LpStatus::Infeasible;
      return out;
    }
    Column& c = cols[static_cast<std::size_t>(j)];
    c.first = ns;
    if (std::isfinite(l)) {
      c.map = VarMap::Shift;
      c.offset = l;
      ns += 1;
    } else if (std::isfinite(u)) {
      c.map = VarMap::Negate;
      c.offset = u;
      ns += 1;
    } else {
      c.map = VarMap::Split;
      ns += 2;
    }
  }

  auto transform = [&](const Eigen::VectorXd& a, double& shift) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ns);
    shift = 0.0;
    for (int j = 0; j < n; ++j) {
      const Column& c = cols[static_cast<std::size_t>(j)];
      const double v = a[j];
      if (v == 0.0) continue;
      switch (c.map) {
        case VarMap::Shift:
          out[c.first] = v;
          shift += v * c.offset;
          break;
        case VarMap::Negate:
          out[c.first] = -v;
          shift += v * c.offset;
          break;
        case VarMap::Split:
          out[c.first] = v;
          out[c.first + 1] = -v;
          break;
      }
    }
    return out;
  };

  std::vector<StdRow> rows;
  for (int i = 0; i < lp.num_rows(); ++i) {
    double shift = 0.0;
    Eigen::VectorXd a = transform(lp.row(i), shift);
    const double b = lp.rhs(i) - shift;
    switch (lp.sense(i)) {
      case Sense::LessEqual:
        rows.push_back({a, b, i, 1.0});
        break;
      case Sense::GreaterEqual:
        rows.push_back({-a, -b, i, -1.0});
        break;
      case Sense::Equal:
        rows.push_back({a, b, i, 1.0});
        rows.push_back({-a, -b, i, -1.0});
        break;
    }
  }
  for (int j = 0; j < n; ++j) {
    const Column& c = cols[static_cast<std::size_t>(j)];
    if (c.map == VarMap::Shift && std::isfinite(lp.upper(j))) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(ns);
      a[c.first] = 1.0;
      rows.push_back({a, lp.upper(j) - c.offset, -1, 1.0});
    }
  }

  double unused = 0.0;
  const Eigen::VectorXd cstd = transform(lp.objective(), unused);

  LpSolution out;
  Tableau tab(rows, ns, options);
  if (!tab.phase_one(out.pivots)) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  if (!tab.phase_two(cstd, out.pivots)) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  const Eigen::VectorXd y = tab.structural_values();
  out.x.resize(n);
  for (int j = 0; j < n; ++j) {
    const Column& c = cols[static_cast<std::size_t>(j)];
    switch (c.map) {
      case VarMap::Shift: out.x[j] = c.offset + y[c.first]; break;
      case VarMap::Negate: out.x[j] = c.offset - y[c.first]; break;
      case VarMap::Split: out.x[j] = y[c.first] - y[c.first + 1]; break;
    }
  }
  out.objective = lp.objective().dot(out.x);
  out.duals = Eigen::VectorXd::Zero(lp.num_rows());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].origin >= 0) out.duals[rows[k].origin] += rows[k].sign * tab.slack_dual(static_cast<int>(k));
  }
  out.status = LpStatus::Optimal;
  return out;
}

std::string dump_lp(const LpInstance& lp) {
  std::ostringstream os;
  auto linear = [&](const Eigen::VectorXd& a) {
    bool first = true;
    for (int j = 0; j < lp.num_vars(); ++j) {
      if (a[j] == 0.0) continue;
      os << (first ? "" : " ") << (a[j] < 0.0 ? "- " : (first ? "" : "+ ")) << expr::format_number(std::abs(a[j])) << " "
         << lp.var_name(j);
      first = false;
    }
    if (first) os << "0";
  };
  os << "vars " << lp.num_vars() << " rows " << lp.num_rows() << "\n";
  os << "maximize ";
  linear(lp.objective());
  os << "\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    os << "bound " << lp.var_name(j) << " [" << expr::format_number(lp.lower(j)) << ", " << expr::format_number(lp.upper(j))
       << "]\n";
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    os << "row " << i;
    if (!lp.label(i).empty()) os << " " << lp.label(i);
    os << ": ";
    linear(lp.row(i));
    os << (lp.sense(i) == Sense::LessEqual ? " <= " : lp.sense(i) == Sense::Equal ? " = " : " >= ")
       << expr::format_number(lp.rhs(i)) << "\n";
  }
  return os.str();
}

}  // namespace quadue::linops
