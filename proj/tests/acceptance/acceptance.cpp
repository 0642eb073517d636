// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
//
//   quadue_acceptance [--quick]
//
// --quick skips the bound study and the determinism reruns.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadue/construct.hpp"
#include "quadue/error.hpp"
#include "quadue/linops.hpp"
#include "quadue/lp_builder.hpp"
#include "quadue/problem.hpp"
#include "quadue/sampling.hpp"
#include "quadue/studies.hpp"
#include "quadue/vertex_polytope.hpp"

using namespace quadue;
using Eigen::VectorXd;

namespace {

constexpr double kEps = 1e-3;
constexpr std::uint64_t kSeed = 1;

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %2d %-28s %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, title, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// 10^4 check points: a 10^4 grid in 1D, 100 x 100 in 2D, Halton beyond.
std::vector<VectorXd> check_grid(const BoxDomain& box) {
  const int n = box.dim();
  if (n == 1) return midpoint_grid(box, 10000);
  if (n == 2) return midpoint_grid(box, 100);
  return scrambled_halton(box, 10000, 7);
}

struct Observed {
  // Soundness, convexity, monotonicity.
  int checked = 0;
  double worst_excess = -1e300;  // max q - f - 2 eps
  std::string worst_where;
  double min_eig = 1e300;
  int trace_breaks = 0;
  int updates = 0;
  double worst_increase = 0.0;  // max q_new - q_old
};

struct HierarchyRun {
  HierarchyStudy study;
  std::vector<MethodAggregate> agg;
  std::string csv;
  double seconds = 0.0;
};

HierarchyRun run_hierarchy(Observed* obs) {
  const auto t0 = std::chrono::steady_clock::now();
  HierarchyOptions o;
  o.seed = kSeed;
  o.epsilon = kEps;
  std::map<std::string, std::vector<VectorXd>> grids;
  std::map<std::string, std::vector<double>> fvals;
  std::uint64_t update_seed = 0;
  if (obs) {
    o.on_result = [&](const DcFunction& f, const ConstructionResult& r) {
      const auto& tr = r.report.bound_trace;
      for (std::size_t i = 1; i < tr.size(); ++i)
        if (tr[i] < tr[i - 1] - 1e-9 * (1.0 + std::abs(tr[i - 1]))) ++obs->trace_breaks;
      if (!r.converged()) return;
      if (!grids.count(f.name())) {
        grids[f.name()] = check_grid(f.box());
        auto& fv = fvals[f.name()];
        for (const auto& x : grids[f.name()]) fv.push_back(f.value(x));
      }
      const auto& pts = grids[f.name()];
      const auto& fv = fvals[f.name()];
      ++obs->checked;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double excess = q_eval(r.u, pts[i]) - fv[i] - 2.0 * kEps;
        if (excess > obs->worst_excess) {
          obs->worst_excess = excess;
          obs->worst_where = f.name() + "/" + std::string(to_string(r.u.method));
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.u.scaled_spectrum());
      obs->min_eig = std::min(obs->min_eig, es.eigenvalues().minCoeff());
    };
    o.on_update = [&](const DcFunction& f, const QuadUnderestimator& before, const QuadUnderestimator& after) {
      ++obs->updates;
      Rng rng(derive_seed(99, update_seed++));
      const BoxDomain& box = f.box();
      VectorXd x(box.dim());
      for (int k = 0; k < 1000; ++k) {
        for (int i = 0; i < box.dim(); ++i) x[i] = box.lower()[i] + rng.uniform() * box.width()[i];
        const double qo = q_eval(before, x);
        obs->worst_increase = std::max(obs->worst_increase, (q_eval(after, x) - qo) / (1.0 + std::abs(qo)));
      }
    };
  }
  HierarchyRun run;
  run.study = run_hierarchy_study(coconut_functions(), o);
  run.agg = aggregate(run.study);
  run.csv = hierarchy_csv(run.study, 1) + hierarchy_csv(run.study, 2) + hierarchy_summary_csv(run.agg);
  run.seconds = since(t0);
  return run;
}

const MethodAggregate* find(const std::vector<MethodAggregate>& agg, int group, int n, Method m) {
  for (const auto& a : agg)
    if (a.group == group && a.n == n && a.method == m) return &a;
  return nullptr;
}

double mean_of(const std::vector<MethodAggregate>& agg, int group, int n, Method m) {
  const auto* a = find(agg, group, n, m);
  return a ? a->mean : std::nan("");
}

// ---------------------------------------------------------------------------
// LP oracle: every basic solution of a bounded LP.

struct Ineq {
  VectorXd a;
  double b;
  bool eq;
};

// Returns false when infeasible; otherwise the best objective.
bool enumerate_lp(const linops::LpInstance& lp, double* best) {
  const int n = lp.num_vars();
  std::vector<Ineq> all;
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto s = lp.sense(i);
    if (s == linops::Sense::LessEqual) all.push_back({lp.row(i), lp.rhs(i), false});
    if (s == linops::Sense::GreaterEqual) all.push_back({-lp.row(i), -lp.rhs(i), false});
    if (s == linops::Sense::Equal) all.push_back({lp.row(i), lp.rhs(i), true});
  }
  for (int j = 0; j < n; ++j) {
    all.push_back({VectorXd::Unit(n, j), lp.upper(j), false});
    all.push_back({-VectorXd::Unit(n, j), -lp.lower(j), false});
  }
  const int m = static_cast<int>(all.size());
  bool found = false;
  *best = -1e300;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    Eigen::MatrixXd a(n, n);
    VectorXd b(n);
    int r = 0;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1u) {
        a.row(r) = all[static_cast<std::size_t>(i)].a.transpose();
        b[r++] = all[static_cast<std::size_t>(i)].b;
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < n) continue;
    const VectorXd x = lu.solve(b);
    bool ok = true;
    for (const auto& c : all) {
      const double v = c.a.dot(x) - c.b;
      if (v > 1e-9 || (c.eq && v < -1e-9)) ok = false;
    }
    if (!ok) continue;
    found = true;
    *best = std::max(*best, lp.objective().dot(x));
  }
  return found;
}

bool lp_oracle_check(int trials, std::string* detail) {
  Rng rng(2024);
  int mismatches = 0, infeasible = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int rows = 1 + static_cast<int>(rng.below(5));
    linops::LpInstance lp(n);
    for (int j = 0; j < n; ++j) {
      lp.objective()[j] = 2.0 * rng.uniform() - 1.0;
      lp.set_bounds(j, -1.0 - 2.0 * rng.uniform(), 1.0 + 2.0 * rng.uniform());
    }
    for (int i = 0; i < rows; ++i) {
      VectorXd a(n);
      for (int j = 0; j < n; ++j) a[j] = 2.0 * rng.uniform() - 1.0;
      const std::uint64_t s = rng.below(6);
      const auto sense = s < 3 ? linops::Sense::LessEqual : (s < 5 ? linops::Sense::GreaterEqual : linops::Sense::Equal);
      lp.add_row(a, sense, 2.0 * rng.uniform() - 1.0);
    }
    double ref = 0.0;
    const bool feasible = enumerate_lp(lp, &ref);
    const auto sol = linops::solve_lp(lp);
    if (!feasible) {
      ++infeasible;
      if (sol.status != linops::LpStatus::Infeasible) ++mismatches;
      continue;
    }
    if (sol.status != linops::LpStatus::Optimal) {
      ++mismatches;
      continue;
    }
    const double err = std::abs(sol.objective - ref);
    worst = std::max(worst, err);
    if (err > 1e-7) ++mismatches;
  }
  std::ostringstream os;
  os << "lp " << trials << " (" << infeasible << " infeasible), mismatches " << mismatches << ", max err " << worst;
  *detail = os.str();
  return mismatches == 0;
}

bool vertex_oracle_check(int sequences, std::string* detail) {
  Rng rng(77);
  int mismatches = 0, cuts = 0;
  for (int s = 0; s < sequences; ++s) {
    const int d = 2 + s % 3;
    auto poly = VertexPolytope::box(VectorXd::Constant(d, -1.0), VectorXd::Constant(d, 1.0));
    for (int k = 0; k < 8; ++k) {
      VectorXd centroid = VectorXd::Zero(d);
      for (const auto& v : poly.vertices()) centroid += v;
      centroid /= poly.num_vertices();
      VectorXd a(d);
      for (int i = 0; i < d; ++i) a[i] = 2.0 * rng.uniform() - 1.0;
      if (a.norm() < 1e-3) continue;
      a.normalize();
      double reach = -1e300;
      for (const auto& v : poly.vertices()) reach = std::max(reach, a.dot(v - centroid));
      const double offset = a.dot(centroid) + (0.2 + 0.6 * rng.uniform()) * reach;
      poly.add_cut({a, offset});
      ++cuts;
      const auto ref = exhaustive_vertices(poly.halfspaces(), d);
      bool same = static_cast<int>(ref.size()) == poly.num_vertices();
      for (const auto& v : poly.vertices()) {
        const bool hit = std::any_of(ref.begin(), ref.end(), [&](const VectorXd& r) {
          return (r - v).cwiseAbs().maxCoeff() <= 1e-7;
        });
        same = same && hit;
      }
      if (!same) ++mismatches;
    }
  }
  std::ostringstream os;
  os << "vertex " << sequences << " sequences / " << cuts << " cuts, mismatches " << mismatches;
  *detail = os.str();
  return mismatches == 0;
}

// ---------------------------------------------------------------------------

DcFunction convex_test_function(int n) {
  std::ostringstream os;
  os << "name: lp_shape\nn: " << n << "\nbox:";
  for (int i = 0; i < n; ++i) os << " [-1, 1]";
  os << "\nh: ";
  for (int i = 1; i <= n; ++i) os << (i > 1 ? " + " : "") << (i + 1) << "*x" << i << "^2";
  os << " + 0.1*(";
  for (int i = 1; i <= n; ++i) os << (i > 1 ? " + " : "") << "x" << i;
  os << ")^4\ng: 0\n";
  return parse_functions(os.str()).front();
}

bool lp_shape_check(std::string* detail) {
  std::ostringstream os;
  bool ok = true;
  for (int n = 1; n <= 4; ++n) {
    const DcFunction f = convex_test_function(n);
    const VectorXd x0 = VectorXd::Constant(n, 0.1);
    const auto lc = check_local_convexity(f, x0);
    const VectorXd xs = VectorXd::Constant(n, -0.7);
    const auto samples = latin_hypercube(f.box(), default_sample_size(n), 5).points;
    std::vector<double> fv;
    for (const auto& x : samples) fv.push_back(f.value(x));
    const LpSampleSet set{samples, fv};

    const auto d1 = build_lp(Method::D, true, make_underestimator(lc, x0, Method::D), xs, f.value(xs), set, kEps);
    const auto d = build_lp(Method::D, false, make_underestimator(lc, x0, Method::D), xs, f.value(xs), set, kEps);
    const auto m = build_lp(Method::M, false, make_underestimator(lc, x0, Method::M), xs, f.value(xs), set, kEps);
    const int s = static_cast<int>(samples.size());
    const bool good = d1.lp.num_rows() == s + 2 * n + 1 && d.lp.num_rows() == 2 * n + 1 &&
                      m.lp.num_vars() == n * n + 2 * n * (n - 1) &&
                      m.lp.num_rows() == 4 * n + 5 * n * (n - 1) + 1;
    ok = ok && good;
    os << "n" << n << " D1 " << d1.lp.num_rows() << " D " << d.lp.num_rows() << " M " << m.lp.num_vars() << "x"
       << m.lp.num_rows() << (good ? "" : " (wrong)") << (n < 4 ? "; " : "");
  }
  *detail = os.str();
  return ok;
}

struct BoundRun {
  std::vector<BoundRow> rows;
  std::string csv;
  double seconds = 0.0;
};

BoundRun run_bounds() {
  const auto t0 = std::chrono::steady_clock::now();
  BoundStudyOptions o;
  o.relaxation.seed = kSeed;
  o.relaxation.epsilon = kEps;
  BoundRun run;
  run.rows = run_bound_study(appendix_problems(), o);
  run.csv = bound_csv(run.rows);
  run.seconds = since(t0);
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;

  Observed obs;
  const HierarchyRun h = run_hierarchy(&obs);
  const auto& agg = h.agg;
  const auto& rows = h.study.rows;

  // 1 soundness
  report(1, "underestimation soundness", obs.checked > 0 && obs.worst_excess <= 0.0,
         std::to_string(obs.checked) + " underestimators, max q - f - 2eps " + fmt("%.3g", obs.worst_excess) + " (" +
             obs.worst_where + ")",
         h.seconds);

  // 2 convexity
  report(2, "convexity", obs.min_eig >= -1e-8, "min eigenvalue of A Lambda " + fmt("%.3g", obs.min_eig), 0.0);

  // 3 monotonicity
  report(3, "monotonicity", obs.trace_breaks == 0 && obs.worst_increase <= 1e-12,
         std::to_string(obs.trace_breaks) + " trace decreases; " + std::to_string(obs.updates) +
             " updates, max relative q increase " + fmt("%.3g", obs.worst_increase),
         0.0);

  // 4 univariate collapse
  {
    double lo = 1e300, hi = -1e300, worst_dev = 0.0;
    int found = 0;
    for (Method m : kAllMethods) {
      const double v = mean_of(agg, 1, 1, m);
      if (std::isnan(v)) continue;
      ++found;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      worst_dev = std::max(worst_dev, std::abs(v - 0.559));
    }
    const bool ok = found == 7 && hi - lo <= 1e-3 && worst_dev <= 0.10;
    std::ostringstream os;
    os << "1D means in [" << fmt("%.4f", lo) << ", " << fmt("%.4f", hi) << "], max |mean - 0.559| "
       << fmt("%.3f", worst_dev);
    report(4, "univariate collapse", ok, os.str(), h.seconds);
  }

  // 5 2D ordering
  {
    const double s = mean_of(agg, 1, 2, Method::S), d = mean_of(agg, 1, 2, Method::D), m = mean_of(agg, 1, 2, Method::M);
    const double u = mean_of(agg, 1, 2, Method::UDS), ds = mean_of(agg, 1, 2, Method::DS),
                 ms = mean_of(agg, 1, 2, Method::MS);
    const double got[6] = {s, d, m, u, ds, ms};
    const double ref[6] = {0.384, 0.449, 0.464, 0.467, 0.499, 0.502};
    bool ok = m >= d && d >= s - 0.01 && ms >= ds && ds >= u - 0.01;
    std::ostringstream os;
    const char* names[6] = {"S", "D", "M", "UDS", "DS", "MS"};
    for (int i = 0; i < 6; ++i) {
      ok = ok && std::abs(got[i] - ref[i]) <= 0.10;
      os << names[i] << " " << fmt("%.3f", got[i]) << (i < 5 ? ", " : "");
    }
    report(5, "2D hierarchy ordering", ok, os.str(), h.seconds);
  }

  // 6 shift-required group
  {
    bool ss_zero = true, all_conv = true;
    int count = 0;
    for (const auto& r : rows) {
      if (r.group != 2 || !has_shift(r.method)) continue;
      ++count;
      if (r.outcome != Outcome::Converged) all_conv = false;
      if (r.method == Method::SS && r.metric != 0.0) ss_zero = false;
    }
    const double u = mean_of(agg, 2, 2, Method::UDS), ds = mean_of(agg, 2, 2, Method::DS),
                 ms = mean_of(agg, 2, 2, Method::MS);
    const bool ok = count > 0 && ss_zero && all_conv && u > 0 && ds > 0 && ms > 0 && std::abs(u - 0.094) <= 0.08 &&
                    std::abs(ds - 0.115) <= 0.08 && std::abs(ms - 0.122) <= 0.08;
    std::ostringstream os;
    os << count << " shifted constructions, all converged " << (all_conv ? "yes" : "no") << ", SS exactly 0 "
       << (ss_zero ? "yes" : "no") << ", 2D UDS " << fmt("%.3f", u) << " DS " << fmt("%.3f", ds) << " MS "
       << fmt("%.3f", ms);
    report(6, "shift-required group", ok, os.str(), h.seconds);
  }

  // 7 shift at a concave-tangent point
  {
    const auto t0 = std::chrono::steady_clock::now();
    const DcFunction& f = coconut_function("ex4_1_6");
    const VectorXd x0 = VectorXd::Constant(1, -0.125);
    ConstructOptions co;
    co.epsilon = kEps;
    co.seed = kSeed;
    const auto s = construct(f, x0, Method::S, co);
    const auto u = construct(f, x0, Method::UDS, co);
    const bool ok = s.report.outcome == Outcome::ShiftRequired && u.converged() && u.u.gamma > 0.0;
    report(7, "ex4_1_6 shift", ok,
           "S " + std::string(to_string(s.report.outcome)) + ", UDS " + std::string(to_string(u.report.outcome)) +
               " gamma " + fmt("%.4g", u.u.gamma),
           since(t0));
  }

  // 8 sisser
  {
    int points = 0, bad = 0;
    for (const auto& r : rows) {
      if (r.function != "sisser") continue;
      if (r.method == Method::S) ++points;
      const bool want_shift = !has_shift(r.method);
      const bool good = want_shift ? r.outcome == Outcome::ShiftRequired : r.outcome == Outcome::Converged;
      if (!good) ++bad;
    }
    report(8, "sisser pathology", points == 25 && bad == 0,
           std::to_string(points) + " points, " + std::to_string(bad) + " unexpected outcomes", 0.0);
  }

  // 9 LP shapes
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    const bool ok = lp_shape_check(&detail);
    report(9, "LP shapes", ok, detail, since(t0));
  }

  // 10 oracles
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::string dv, dl;
    const bool ok_v = vertex_oracle_check(50, &dv);
    const bool ok_l = lp_oracle_check(500, &dl);
    report(10, "oracle equivalence", ok_v && ok_l, dv + "; " + dl, since(t0));
  }

  if (quick) {
    std::printf("[SKIP] 11 bound study (--quick)\n[SKIP] 12 determinism (--quick)\n");
    return failures == 0 ? 0 : 1;
  }

  // 11 bound study
  const BoundRun b = run_bounds();
  {
    bool sound = true;
    std::map<int, std::pair<double, int>> by_dim;
    for (const auto& r : b.rows) {
      if (r.result.lb_quad > r.result.reference + 1e-6) sound = false;
      auto& acc = by_dim[r.n];
      acc.first += r.result.gap_reduction;
      ++acc.second;
    }
    bool positive = true;
    std::ostringstream os;
    os << b.rows.size() << " problems, bounds below reference " << (sound ? "yes" : "no") << ", mean reduction";
    for (const auto& [n, acc] : by_dim) {
      const double mean = acc.first / acc.second;
      if (n >= 2 && !(mean > 0.0)) positive = false;
      os << " " << n << "D " << fmt("%.3f", mean);
    }
    report(11, "bound study", b.rows.size() == 24 && sound && positive, os.str(), b.seconds);
  }

  // 12 determinism
  {
    const HierarchyRun h2 = run_hierarchy(nullptr);
    const BoundRun b2 = run_bounds();
    const bool same_h = h2.csv == h.csv;
    const bool same_b = b2.csv == b.csv;
    report(12, "determinism", same_h && same_b,
           std::string("hierarchy CSV ") + (same_h ? "identical" : "differs") + ", bound CSV " +
               (same_b ? "identical" : "differs"),
           h2.seconds + b2.seconds);
  }

  return failures == 0 ? 0 : 1;
}
