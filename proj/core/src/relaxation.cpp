#include "quadue/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadue/error.hpp"
#include "quadue/sampling.hpp"

namespace quadue {

namespace {

// Locally convex Latin hypercube points for one function, drawn in batches of
// `want` points until enough are accepted.
std::vector<Eigen::VectorXd> construction_points(const DcFunction& f, int want, std::uint64_t seed, double psd_tol) {
  std::vector<Eigen::VectorXd> out;
  const int budget = 100 * want;
  int drawn = 0;
  for (std::uint64_t batch = 0; static_cast<int>(out.size()) < want; ++batch) {
    if (drawn >= budget)
      throw Error(ErrorKind::NoValidPoint, "no locally convex point of construction for " + f.name() + " in " +
                                               std::to_string(budget) + " draws");
    for (const auto& x : latin_hypercube(f.box(), want, derive_seed(seed, batch)).points) {
      ++drawn;
      if (check_local_convexity(f, x, psd_tol).convex) out.push_back(x);
      if (static_cast<int>(out.size()) == want) break;
    }
  }
  return out;
}

QuadGroup underestimate(const DcFunction& f, const RelaxationOptions& opt, std::uint64_t seed, int& constructions) {
  QuadGroup group;
  ConstructOptions co;
  co.epsilon = opt.epsilon;
  co.initial_alpha = opt.initial_alpha;
  const auto points = construction_points(f, opt.per_dim * f.dim(), seed, co.psd_tol);
  for (std::size_t j = 0; j < points.size(); ++j) {
    co.seed = derive_seed(seed, 0x10000 + j);
    ConstructionResult r = construct(f, points[j], opt.method, co);
    ++constructions;
    if (!r.converged())
      throw Error(ErrorKind::IterationLimit,
                  "construction for " + f.name() + " ended " + std::string(to_string(r.report.outcome)));
    group.qs.push_back(std::move(r.u));
  }
  return group;
}

LinearRow linear_row(const DcFunction& body, double rhs) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(body.dim());
  return {body.grad(zero), rhs - body.value(zero)};
}

}  // namespace

QcqpRelaxation build_relaxation(const ProblemInstance& p, const RelaxationOptions& options) {
  if (options.per_dim < 1) throw Error(ErrorKind::InvalidConfig, "per_dim must be at least 1");
  QcqpRelaxation r{p.box(), {}, {}, {}, options.epsilon, 0};
  r.objective = underestimate(p.objective, options, derive_seed(options.seed, 0), r.constructions);
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const Constraint& c = p.constraints[k];
    if (c.cls == ConstraintClass::Linear) {
      r.linear.push_back(linear_row(c.body, c.rhs));
      continue;
    }
    QuadGroup g = underestimate(c.body, options, derive_seed(options.seed, k + 1), r.constructions);
    g.rhs = c.rhs;
    r.constraints.push_back(std::move(g));
  }
  return r;
}

QcqpRelaxation build_baseline_relaxation(const ProblemInstance& p, RelaxationOptions options) {
  options.method = Method::SS;
  options.initial_alpha = 0.0;
  return build_relaxation(p, options);
}

namespace {

// Kelley master LP over y = (x, t): minimize t subject to G y <= h. Solved
// through its dual, max -h.lambda s.t. G' lambda = -e_t, lambda >= 0, which
// has only n + 1 rows however many cuts accumulate; y is read off the duals.
class KelleyMaster {
 public:
  explicit KelleyMaster(int n) : n_(n) {}

  void add(Eigen::VectorXd g, double h) {
    rows_.push_back(std::move(g));
    rhs_.push_back(h);
  }
  int size() const { return static_cast<int>(rows_.size()); }

  // Returns false when the primal is infeasible.
  bool solve(Eigen::VectorXd& y, double& value) const {
    const int m = size();
    linops::LpInstance dual(m);
    for (int j = 0; j < m; ++j) {
      dual.objective()[j] = -rhs_[static_cast<std::size_t>(j)];
      dual.set_bounds(j, 0.0, linops::kInf);
    }
    for (int k = 0; k <= n_; ++k) {
      Eigen::VectorXd col(m);
      for (int j = 0; j < m; ++j) col[j] = rows_[static_cast<std::size_t>(j)][k];
      dual.add_row(col, linops::Sense::Equal, k == n_ ? -1.0 : 0.0);
    }
    linops::LpOptions lo;
    lo.max_pivots = 1000000;
    const linops::LpSolution sol = linops::solve_lp(dual, lo);
    if (sol.status == linops::LpStatus::Unbounded) return false;
    if (sol.status != linops::LpStatus::Optimal) throw Error(ErrorKind::InvalidArgument, "Kelley master LP has no bounded optimum");
    y = -sol.duals;
    value = sol.objective;
    return true;
  }

 private:
  int n_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<double> rhs_;
};

// Cut q(x) - shift + grad q(xb).(x - xb) - [t] <= rhs, tangent at xb.
void tangent_cut(KelleyMaster& master, const QuadUnderestimator& q, double shift, const Eigen::VectorXd& xb,
                 bool epigraph, double rhs) {
  const int n = q.dim();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n + 1);
  const Eigen::VectorXd gq = q_grad(q, xb);
  g.head(n) = gq;
  if (epigraph) g[n] = -1.0;
  master.add(std::move(g), rhs - (q_eval(q, xb) - shift) + gq.dot(xb));
}

}  // namespace

KelleyResult solve_qcqp(const QcqpRelaxation& r, double tol, int max_cuts) {
  if (r.objective.qs.empty()) throw Error(ErrorKind::InvalidConfig, "relaxation has no objective underestimators");
  const int n = r.box.dim();
  KelleyMaster master(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    e[i] = 1.0;
    master.add(e, r.box.upper()[i]);
    master.add(-e, -r.box.lower()[i]);
  }
  for (const auto& row : r.linear) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n + 1);
    g.head(n) = row.a;
    master.add(std::move(g), row.b);
  }
  for (const auto& q : r.objective.qs) tangent_cut(master, q, r.shift, q.x0, true, 0.0);
  for (const auto& grp : r.constraints)
    for (const auto& q : grp.qs) tangent_cut(master, q, r.shift, q.x0, false, grp.rhs);

  KelleyResult res;
  Eigen::VectorXd y;
  for (;;) {
    double value = 0.0;
    if (!master.solve(y, value)) throw Error(ErrorKind::InfeasibleInstance, "relaxation is infeasible");
    ++res.iterations;
    res.bound = value;
    res.x = r.box.clamp(y.head(n));
    res.t = y[n];

    // Most violated piece of each max-of-quadratics function.
    double worst = 0.0;
    auto most_violated = [&](const QuadGroup& grp, double level) {
      const QuadUnderestimator* arg = nullptr;
      double v = tol;
      for (const auto& q : grp.qs) {
        const double viol = q_eval(q, res.x) - r.shift - level;
        worst = std::max(worst, viol);
        if (viol > v) {
          v = viol;
          arg = &q;
        }
      }
      return arg;
    };
    int added = 0;
    if (const auto* q = most_violated(r.objective, res.t)) {
      tangent_cut(master, *q, r.shift, res.x, true, 0.0);
      ++added;
    }
    for (const auto& grp : r.constraints)
      if (const auto* q = most_violated(grp, grp.rhs)) {
        tangent_cut(master, *q, r.shift, res.x, false, grp.rhs);
        ++added;
      }
    res.max_violation = worst;
    if (added == 0) return res;
    res.cuts += added;
    if (res.cuts > max_cuts) throw Error(ErrorKind::IterationLimit, "Kelley loop exceeded the cut budget");
  }
}

ReferenceOptimum reference_optimum(const ProblemInstance& p, std::uint64_t seed) {
  const int n = p.dim();
  const BoxDomain& box = p.box();
  std::vector<Eigen::VectorXd> pts;
  if (n <= 2) {
    // 512 points per axis including the faces.
    const int per = 512;
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= per;
    pts.reserve(total);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < total; ++k) {
      Eigen::VectorXd x(n);
      for (int d = 0; d < n; ++d)
        x[d] = box.lower()[d] + box.width()[d] * idx[static_cast<std::size_t>(d)] / (per - 1.0);
      pts.push_back(std::move(x));
      for (int d = 0; d < n && ++idx[static_cast<std::size_t>(d)] == per; ++d) idx[static_cast<std::size_t>(d)] = 0;
    }
  } else {
    pts = scrambled_halton(box, 1 << 18, seed);
  }

  std::vector<std::pair<double, std::size_t>> feasible;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (p.feasible(pts[k])) feasible.emplace_back(p.objective.value(pts[k]), k);
  if (feasible.empty()) throw Error(ErrorKind::InfeasibleInstance, "no feasible point found for " + p.name);

  ReferenceOptimum best;
  best.feasible_points = static_cast<int>(feasible.size());
  const std::size_t starts = std::min<std::size_t>(32, feasible.size());
  std::partial_sort(feasible.begin(), feasible.begin() + static_cast<std::ptrdiff_t>(starts), feasible.end());
  best.value = feasible.front().first;
  best.x = pts[feasible.front().second];

  // Compass search that only accepts feasible improvements.
  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::VectorXd x = pts[feasible[s].second];
    double fx = feasible[s].first;
    double step = 0.05 * box.width().maxCoeff();
    for (int evals = 0; step > 1e-9 && evals < 4000;) {
      bool moved = false;
      for (int d = 0; d < n && !moved; ++d)
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd y = x;
          y[d] += sign * step;
          y = box.clamp(y);
          ++evals;
          if (!p.feasible(y)) continue;
          const double fy = p.objective.value(y);
          if (fy < fx) {
            x = y;
            fx = fy;
            moved = true;
            break;
          }
        }
      if (!moved) step *= 0.5;
    }
    if (fx < best.value) {
      best.value = fx;
      best.x = x;
    }
  }
  return best;
}

double gap_reduction(double lb_quad, double lb_base, double opt) {
  const double gap = opt - lb_base;
  if (gap <= 1e-12) return 0.0;
  return (lb_quad - lb_base) / gap;
}

double baseline_linear_bound(const ProblemInstance& p, const RelaxationOptions& options) {
  return solve_qcqp(build_baseline_relaxation(p, options)).bound;
}

BoundResult bound_problem(const ProblemInstance& p, const RelaxationOptions& options) {
  BoundResult b;
  const QcqpRelaxation quad = build_relaxation(p, options);
  const KelleyResult kq = solve_qcqp(quad);
  const QcqpRelaxation base = build_baseline_relaxation(p, options);
  const KelleyResult kb = solve_qcqp(base);
  b.lb_quad = kq.bound;
  b.lb_base = kb.bound;
  b.reference = reference_optimum(p, options.seed).value;
  b.gap_reduction = gap_reduction(b.lb_quad, b.lb_base, b.reference);
  b.constructions = quad.constructions + base.constructions;
  b.cuts = kq.cuts + kb.cuts;
  b.kelley_iterations = kq.iterations + kb.iterations;
  return b;
}

}  // namespace quadue
