#include "quadue/studies.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "quadue/error.hpp"
#include "quadue/metric.hpp"
#include "quadue/sampling.hpp"

namespace quadue {

void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string csv_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s[0] == '-' ? 1 : 0);  // no "-0.000"
  return s;
}

namespace {

std::uint64_t name_label(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

std::string point_text(const Eigen::VectorXd& x) {
  std::string out;
  for (int i = 0; i < x.size(); ++i) {
    if (i > 0) out += ' ';
    out += csv_number(x[i], 6);
  }
  return out;
}

struct PointJob {
  std::size_t function = 0;
  int point = 0;
  Eigen::VectorXd x0;
};

bool wants(const HierarchyOptions& o, Method m) {
  return std::find(o.methods.begin(), o.methods.end(), m) != o.methods.end();
}

HierarchyRow make_row(const DcFunction& f, const PointJob& job, Method m, const ConstructionResult& r) {
  HierarchyRow row;
  row.function = f.name();
  row.n = f.dim();
  row.point = job.point;
  row.x0 = job.x0;
  row.method = m;
  row.outcome = r.report.outcome;
  if (r.converged()) {
    row.alpha_min = r.u.A.diagonal().minCoeff();
    row.gamma = r.u.gamma;
  }
  row.iterations = r.report.iterations;
  row.vertices = r.report.vertices_enumerated;
  row.lp_solves = r.report.lp_solves;
  row.wall_seconds = r.report.wall_seconds;
  return row;
}

}  // namespace

HierarchyStudy run_hierarchy_study(const std::vector<DcFunction>& functions, const HierarchyOptions& options) {
  HierarchyStudy study;
  std::vector<PointJob> jobs;
  // Points of construction: Latin hypercube batches, keeping the locally
  // convex ones until enough are accepted.
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    const DcFunction& f = functions[fi];
    const std::uint64_t fseed = derive_seed(options.seed, name_label(f.name()));
    const int want = options.points_per_function;
    int accepted = 0;
    int drawn = 0;
    for (std::uint64_t batch = 0; accepted < want; ++batch) {
      if (drawn > 1000 * want)
        throw Error(ErrorKind::NoValidPoint, "too few locally convex points for " + f.name());
      for (const auto& x : latin_hypercube(f.box(), want, derive_seed(fseed, batch)).points) {
        ++drawn;
        if (!check_local_convexity(f, x).convex) continue;
        jobs.push_back({fi, accepted, x});
        if (++accepted == want) break;
      }
    }
    study.draws.emplace_back(f.name(), drawn);
  }

  std::vector<MetricIntegrator> rules;
  rules.reserve(functions.size());
  for (const auto& f : functions) rules.emplace_back(f, derive_seed(options.seed, name_label(f.name()) + 1), options.metric_points);

  std::vector<std::vector<HierarchyRow>> slots(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), options.jobs, [&](int j) {
    const PointJob& job = jobs[static_cast<std::size_t>(j)];
    const DcFunction& f = functions[job.function];
    const MetricIntegrator& rule = rules[job.function];
    const std::uint64_t fseed = derive_seed(options.seed, name_label(f.name()));
    const int count = options.sample_size > 0 ? options.sample_size : default_sample_size(f.dim());
    const std::vector<Eigen::VectorXd> samples =
        latin_hypercube(f.box(), count, derive_seed(fseed, 0x5000 + static_cast<std::uint64_t>(job.point))).points;
    ConstructOptions co;
    co.epsilon = options.epsilon;
    co.samples = &samples;
    if (options.on_update)
      co.on_update = [&](const QuadUnderestimator& a, const QuadUnderestimator& b) { options.on_update(f, a, b); };

    auto& out = slots[static_cast<std::size_t>(j)];
    const ConstructionResult s = construct(f, job.x0, Method::S, co);
    const int group = s.converged() ? 1 : (s.report.outcome == Outcome::ShiftRequired ? 2 : 0);

    double baseline_gamma = 0.0;
    std::map<Method, ConstructionResult> results;
    results.emplace(Method::S, s);
    if (group == 2) {
      results.emplace(Method::SS, construct(f, job.x0, Method::SS, co));
      baseline_gamma = results.at(Method::SS).u.gamma;
    }
    for (Method m : kAllMethods) {
      if (!wants(options, m)) continue;
      if (!results.count(m)) results.emplace(m, construct(f, job.x0, m, co));
      const ConstructionResult& r = results.at(m);
      if (options.on_result) options.on_result(f, r);
      HierarchyRow row = make_row(f, job, m, r);
      row.group = group;
      if (r.converged() && group != 0) {
        try {
          row.metric = metric(r.u, rule, baseline_gamma).value;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateDenominator) throw;
        }
      }
      out.push_back(std::move(row));
    }
  });
  for (auto& s : slots)
    for (auto& r : s) study.rows.push_back(std::move(r));
  return study;
}

std::vector<MethodAggregate> aggregate(const HierarchyStudy& study) {
  std::map<std::tuple<int, int, int>, std::vector<const HierarchyRow*>> groups;
  for (const auto& r : study.rows)
    if (r.group == 1 || r.group == 2) groups[{r.group, r.n, static_cast<int>(r.method)}].push_back(&r);
  std::vector<MethodAggregate> out;
  for (const auto& [key, rows] : groups) {
    MethodAggregate a;
    a.group = std::get<0>(key);
    a.n = std::get<1>(key);
    a.method = static_cast<Method>(std::get<2>(key));
    a.attempted = static_cast<int>(rows.size());
    double sum = 0.0, sq = 0.0, it = 0.0, vx = 0.0, lp = 0.0;
    for (const auto* r : rows) {
      if (r->outcome == Outcome::Converged) ++a.converged;
      it += r->iterations;
      vx += static_cast<double>(r->vertices);
      lp += r->lp_solves;
      if (std::isnan(r->metric)) continue;
      ++a.count;
      sum += r->metric;
    }
    a.mean = a.count > 0 ? sum / a.count : std::numeric_limits<double>::quiet_NaN();
    for (const auto* r : rows)
      if (!std::isnan(r->metric)) sq += (r->metric - a.mean) * (r->metric - a.mean);
    a.stddev = a.count > 1 ? std::sqrt(sq / (a.count - 1)) : 0.0;
    a.mean_iterations = it / a.attempted;
    a.mean_vertices = vx / a.attempted;
    a.mean_lp_solves = lp / a.attempted;
    out.push_back(a);
  }
  // Order methods as listed in kAllMethods within each (group, n).
  auto rank = [](Method m) { return std::find(kAllMethods.begin(), kAllMethods.end(), m) - kAllMethods.begin(); };
  std::stable_sort(out.begin(), out.end(), [&](const MethodAggregate& a, const MethodAggregate& b) {
    if (a.group != b.group) return a.group < b.group;
    if (a.n != b.n) return a.n < b.n;
    return rank(a.method) < rank(b.method);
  });
  return out;
}

std::string hierarchy_csv(const HierarchyStudy& study, int group) {
  std::ostringstream os;
  os << "function,n,point,x0,method,outcome,metric,alpha_min,gamma,iterations,vertices,lp_solves\n";
  for (const auto& r : study.rows) {
    if (r.group != group) continue;
    os << r.function << ',' << r.n << ',' << r.point << ',' << point_text(r.x0) << ',' << to_string(r.method) << ','
       << to_string(r.outcome) << ',' << csv_number(r.metric) << ',' << csv_number(r.alpha_min) << ','
       << csv_number(r.gamma) << ',' << r.iterations << ',' << r.vertices << ',' << r.lp_solves << '\n';
  }
  return os.str();
}

std::string hierarchy_summary_csv(const std::vector<MethodAggregate>& agg) {
  std::ostringstream os;
  os << "group,n,method,points,converged,metric_mean,metric_std,iterations_mean,vertices_mean,lp_solves_mean\n";
  for (const auto& a : agg)
    os << a.group << ',' << a.n << ',' << to_string(a.method) << ',' << a.attempted << ',' << a.converged << ','
       << csv_number(a.mean, 3) << ',' << csv_number(a.stddev, 3) << ',' << csv_number(a.mean_iterations, 1) << ','
       << csv_number(a.mean_vertices, 1) << ',' << csv_number(a.mean_lp_solves, 1) << '\n';
  return os.str();
}

std::string hierarchy_timing_csv(const HierarchyStudy& study) {
  std::ostringstream os;
  os << "function,point,method,group,seconds\n";
  for (const auto& r : study.rows)
    os << r.function << ',' << r.point << ',' << to_string(r.method) << ',' << r.group << ','
       << csv_number(r.wall_seconds, 6) << '\n';
  return os.str();
}

std::vector<BoundRow> run_bound_study(const std::vector<ProblemInstance>& problems, const BoundStudyOptions& options) {
  std::vector<BoundRow> rows(problems.size());
  parallel_for(static_cast<int>(problems.size()), options.jobs, [&](int i) {
    const ProblemInstance& p = problems[static_cast<std::size_t>(i)];
    const auto start = std::chrono::steady_clock::now();
    RelaxationOptions ro = options.relaxation;
    ro.seed = derive_seed(options.relaxation.seed, name_label(p.name));
    BoundRow& row = rows[static_cast<std::size_t>(i)];
    row.problem = p.name;
    row.n = p.dim();
    row.result = bound_problem(p, ro);
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return rows;
}

namespace {

// Published root-node gap reductions against a commercial solver, by
// dimension; shown for context only.
double context_reduction(int n) {
  switch (n) {
    case 1:
      return 0.788;
    case 2:
      return 0.921;
    case 3:
      return 0.944;
    case 4:
      return 0.945;
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::string bound_csv(const std::vector<BoundRow>& rows) {
  std::ostringstream os;
  os << "problem,n,lb_quad,lb_base,ref_opt,gap_reduction,quad_better,constructions,cuts,context_reduction\n";
  std::map<int, std::vector<const BoundRow*>> by_dim;
  for (const auto& r : rows) {
    const BoundResult& b = r.result;
    os << r.problem << ',' << r.n << ',' << csv_number(b.lb_quad) << ',' << csv_number(b.lb_base) << ','
       << csv_number(b.reference) << ',' << csv_number(b.gap_reduction, 4) << ',' << (b.lb_quad > b.lb_base + 1e-9)
       << ',' << b.constructions << ',' << b.cuts << ",\n";
    by_dim[r.n].push_back(&r);
  }
  for (const auto& [n, rs] : by_dim) {
    double gr = 0.0, lq = 0.0, lb = 0.0, ref = 0.0;
    int better = 0, cons = 0, cuts = 0;
    for (const auto* r : rs) {
      gr += r->result.gap_reduction;
      lq += r->result.lb_quad;
      lb += r->result.lb_base;
      ref += r->result.reference;
      better += r->result.lb_quad > r->result.lb_base + 1e-9;
      cons += r->result.constructions;
      cuts += r->result.cuts;
    }
    const double k = static_cast<double>(rs.size());
    os << "mean_" << n << "d," << n << ',' << csv_number(lq / k) << ',' << csv_number(lb / k) << ','
       << csv_number(ref / k) << ',' << csv_number(gr / k, 4) << ',' << better << ',' << cons << ',' << cuts << ','
       << csv_number(context_reduction(n), 3) << '\n';
  }
  return os.str();
}

std::string bound_timing_csv(const std::vector<BoundRow>& rows) {
  std::ostringstream os;
  os << "problem,n,seconds\n";
  for (const auto& r : rows) os << r.problem << ',' << r.n << ',' << csv_number(r.wall_seconds, 3) << '\n';
  return os.str();
}

}  // namespace quadue
