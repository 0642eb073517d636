#include "quadue/dc_function.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "quadue/error.hpp"

namespace quadue {

BoxDomain::BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0)
    throw Error(ErrorKind::InvalidArgument, "box bounds must be nonempty and of equal length");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]))
      throw Error(ErrorKind::InvalidArgument, "box is degenerate in coordinate " + std::to_string(i + 1));
  }
}

BoxDomain BoxDomain::cube(int n, double lo, double hi) {
  return BoxDomain(Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi));
}

bool BoxDomain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

Eigen::VectorXd BoxDomain::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

std::vector<expr::Interval> BoxDomain::intervals() const {
  std::vector<expr::Interval> out(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) out[static_cast<std::size_t>(i)] = {lower_[i], upper_[i]};
  return out;
}

std::vector<Eigen::VectorXd> BoxDomain::corners() const {
  const int n = dim();
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c[i] = (mask >> i) & 1u ? upper_[i] : lower_[i];
    out.push_back(std::move(c));
  }
  return out;
}

DcFunction::DcFunction(std::string name, expr::Expr h, expr::Expr g, BoxDomain box)
    : name_(std::move(name)), h_(std::move(h)), g_(std::move(g)), box_(std::move(box)) {
  const int n = box_.dim();
  if (n > expr::kMaxDim) throw Error(ErrorKind::InvalidArgument, name_ + ": dimension exceeds " + std::to_string(expr::kMaxDim));
  if (h_.max_variable() >= n || g_.max_variable() >= n)
    throw Error(ErrorKind::InvalidArgument, name_ + ": expression references a variable beyond n = " + std::to_string(n));
  expr::check_domain(h_, box_.lower(), box_.upper());
  expr::check_domain(g_, box_.lower(), box_.upper());
}

expr::SecondOrder DcFunction::second_order(const Eigen::VectorXd& x) const {
  expr::SecondOrder out = expr::eval_second_order(h_, x);
  if (!g_.is_zero()) {
    const expr::SecondOrder sg = expr::eval_second_order(g_, x);
    out.value -= sg.value;
    out.grad -= sg.grad;
    out.hess -= sg.hess;
  }
  return out;
}

Eigen::VectorXd DcFunction::grad(const Eigen::VectorXd& x) const { return second_order(x).grad; }

Eigen::MatrixXd DcFunction::hessian(const Eigen::VectorXd& x) const { return second_order(x).hess; }

DcFunction DcFunction::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  DcFunction out(name_, expr::Expr(s) * h_, g_.is_zero() ? g_ : expr::Expr(s) * g_, box_);
  out.scale_ = scale_.value_or(1.0) * s;
  return out;
}

int default_range_density(int n) { return n <= 2 ? 512 : 64; }

namespace {

constexpr int kPolishStarts = 4;
constexpr int kPolishIterations = 20;

// Keeps the k smallest (value, point) pairs seen.
class BestK {
 public:
  explicit BestK(std::size_t k) : k_(k) {}

  void offer(double value, const Eigen::VectorXd& x) {
    if (items_.size() == k_ && value >= items_.back().first) return;
    auto it = std::upper_bound(items_.begin(), items_.end(), value,
                               [](double v, const auto& item) { return v < item.first; });
    items_.insert(it, {value, x});
    if (items_.size() > k_) items_.pop_back();
  }

  const std::vector<std::pair<double, Eigen::VectorXd>>& items() const { return items_; }

 private:
  std::size_t k_;
  std::vector<std::pair<double, Eigen::VectorXd>> items_;
};

// Projected gradient descent on sign*f with backtracking; returns the best
// value of sign*f found and updates x in place.
double polish(const DcFunction& f, double sign, Eigen::VectorXd& x, double value) {
  const BoxDomain& box = f.box();
  const double scale = box.width().maxCoeff();
  for (int it = 0; it < kPolishIterations; ++it) {
    const Eigen::VectorXd gr = sign * f.grad(x);
    const double norm = gr.norm();
    if (!(norm > 0.0)) break;
    double step = 0.1 * scale / norm;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      const Eigen::VectorXd trial = box.clamp(x - step * gr);
      const double v = sign * f.value(trial);
      if (v < value) {
        x = trial;
        value = v;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return value;
}

}  // namespace

RangeEstimate estimate_range(const DcFunction& f, int grid_density) {
  if (grid_density < 16) throw Error(ErrorKind::InvalidArgument, "range grid density must be at least 16");
  const int n = f.dim();
  const BoxDomain& box = f.box();
  BestK lows(kPolishStarts);
  BestK highs(kPolishStarts);

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd x(n);
  const Eigen::VectorXd step = box.width() / static_cast<double>(grid_density - 1);
  for (;;) {
    for (int i = 0; i < n; ++i)
      x[i] = idx[static_cast<std::size_t>(i)] == grid_density - 1 ? box.upper()[i]
                                                                   : box.lower()[i] + step[i] * idx[static_cast<std::size_t>(i)];
    const double v = f.value(x);
    lows.offer(v, x);
    highs.offer(-v, x);
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == grid_density) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == n) break;
  }

  RangeEstimate out;
  out.min = lows.items().front().first;
  out.argmin = lows.items().front().second;
  for (const auto& [v, p] : lows.items()) {
    Eigen::VectorXd y = p;
    const double r = polish(f, 1.0, y, v);
    if (r < out.min) {
      out.min = r;
      out.argmin = y;
    }
  }
  out.max = -highs.items().front().first;
  out.argmax = highs.items().front().second;
  for (const auto& [v, p] : highs.items()) {
    Eigen::VectorXd y = p;
    const double r = -polish(f, -1.0, y, v);
    if (r > out.max) {
      out.max = r;
      out.argmax = y;
    }
  }
  return out;
}

DcFunction scale_range(const DcFunction& f, int grid_density) {
  const RangeEstimate r = estimate_range(f, grid_density);
  const double m = std::max(std::abs(r.min), std::abs(r.max));
  if (m < 1e-12) throw Error(ErrorKind::DegenerateRange, f.name() + ": range magnitude below 1e-12");
  return f.scaled(1.0 / m);
}

}  // namespace quadue
