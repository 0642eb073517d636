#include "quadue/construct.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "quadue/error.hpp"
#include "quadue/sampling.hpp"
#include "quadue/vertex_polytope.hpp"

namespace quadue {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Converged:
      return "converged";
    case Outcome::NotLocallyConvex:
      return "not_locally_convex";
    case Outcome::ShiftRequired:
      return "shift_required";
    case Outcome::IterationLimit:
      return "iteration_limit";
  }
  return "?";
}

namespace {

struct ShiftRequired {
  std::string why;
};

struct VertexCache {
  Eigen::VectorXd x;  // clamped into the box
  double t = 0.0;
  double h = 0.0;
  double g = 0.0;
  double q = 0.0;
  std::uint64_t stamp = 0;  // parameter version q was computed for
};

class Construction {
 public:
  Construction(const DcFunction& f, Method method, const ConstructOptions& opt, ConstructionResult& out)
      : f_(f), method_(method), opt_(opt), u_(out.u), rep_(out.report) {}

  void run() {
    const BoxDomain& box = f_.box();
    if (uses_lp(method_)) draw_samples();
    init_polytope();

    if (uses_lp(method_) && !samples_.empty()) {
      int worst = -1;
      double worst_gap = -opt_.epsilon;
      for (std::size_t k = 0; k < samples_.size(); ++k) {
        const double gap = sample_f_[k] - q_eval(u_, samples_[k]);
        if (gap < worst_gap) {
          worst_gap = gap;
          worst = static_cast<int>(k);
        }
      }
      if (worst >= 0) solve_update_lp(samples_[static_cast<std::size_t>(worst)], sample_f_[static_cast<std::size_t>(worst)]);
    }

    std::vector<int> fresh(cache_.size());
    for (std::size_t i = 0; i < fresh.size(); ++i) fresh[i] = static_cast<int>(i);

    for (;;) {
      int best = -1;
      double best_phi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < cache_.size(); ++i) {
        const double phi = cache_[i].t - cache_[i].g - q_at(cache_[i]);
        if (phi < best_phi) {
          best_phi = phi;
          best = static_cast<int>(i);
        }
      }
      rep_.bound_trace.push_back(best_phi);
      if (best_phi >= -opt_.epsilon) {
        u_.converged = true;
        rep_.outcome = Outcome::Converged;
        return;
      }
      if (rep_.iterations >= opt_.max_iterations) {
        rep_.outcome = Outcome::IterationLimit;
        rep_.failure = "no convergence after " + std::to_string(rep_.iterations) + " iterations";
        return;
      }
      ++rep_.iterations;

      correct(fresh);

      const VertexCache& vs = cache_[static_cast<std::size_t>(best)];
      if (vs.h - vs.t <= 1e-9 * (1.0 + std::abs(vs.h))) {
        // The vertex sits on the graph of h; a tangent cut there removes
        // nothing, so the violation is one of q itself.
        correct({best});
        fresh.clear();
        continue;
      }
      const Eigen::VectorXd gh = expr::grad(f_.h(), vs.x);
      Halfspace hs;
      hs.normal.resize(box.dim() + 1);
      hs.normal.head(box.dim()) = gh;
      hs.normal[box.dim()] = -1.0;
      hs.offset = gh.dot(vs.x) - vs.h;
      CutResult cut = poly_->add_cut(hs);

      std::vector<VertexCache> next(cut.kept_from.size());
      for (std::size_t i = 0; i < next.size(); ++i) {
        const int from = cut.kept_from[i];
        next[i] = from >= 0 ? std::move(cache_[static_cast<std::size_t>(from)]) : evaluate_vertex(static_cast<int>(i));
      }
      cache_ = std::move(next);
      rep_.vertices_enumerated += static_cast<std::int64_t>(cut.new_vertices.size());
      fresh = std::move(cut.new_vertices);
    }
  }

 private:
  void draw_samples() {
    if (opt_.samples != nullptr) {
      samples_ = *opt_.samples;
    } else {
      const int count = opt_.sample_size > 0 ? opt_.sample_size : default_sample_size(f_.dim());
      samples_ = latin_hypercube(f_.box(), count, opt_.seed).points;
    }
    sample_f_.reserve(samples_.size());
    for (const auto& s : samples_) sample_f_.push_back(f_.value(s));
  }

  void init_polytope() {
    const BoxDomain& box = f_.box();
    const Eigen::VectorXd c = box.center();
    const double hc = f_.eval_h(c);
    const Eigen::VectorXd gc = expr::grad(f_.h(), c);
    double hmax = -std::numeric_limits<double>::infinity();
    double tlo = std::numeric_limits<double>::infinity();
    for (const auto& corner : box.corners()) {
      hmax = std::max(hmax, f_.eval_h(corner));
      tlo = std::min(tlo, hc + gc.dot(corner - c));
    }
    const double margin = 0.1 * std::max(hmax - tlo, 1e-6);
    poly_.emplace(VertexPolytope::epigraph(box, tlo - margin, hmax + margin));
    cache_.reserve(static_cast<std::size_t>(poly_->num_vertices()));
    for (int i = 0; i < poly_->num_vertices(); ++i) cache_.push_back(evaluate_vertex(i));
    rep_.vertices_enumerated = poly_->num_vertices();
  }

  VertexCache evaluate_vertex(int i) const {
    const Eigen::VectorXd& y = poly_->vertices()[static_cast<std::size_t>(i)];
    const int n = f_.dim();
    VertexCache c;
    c.x = f_.box().clamp(y.head(n));
    c.t = y[n];
    c.h = f_.eval_h(c.x);
    c.g = f_.eval_g(c.x);
    return c;
  }

  double q_at(VertexCache& c) const {
    if (c.stamp != version_) {
      c.q = q_eval(u_, c.x);
      c.stamp = version_;
    }
    return c.q;
  }

  double gap(VertexCache& c) const { return c.h - c.g - q_at(c); }

  void commit(const QuadUnderestimator& next) {
    if (opt_.on_update) opt_.on_update(u_, next);
    u_ = next;
    ++version_;
    ++rep_.updates;
  }

  // Corrective update at the vertices listed in ids that violate f >= q - eps.
  void correct(const std::vector<int>& ids) {
    std::vector<int> viol;
    for (int i : ids)
      if (gap(cache_[static_cast<std::size_t>(i)]) < -opt_.epsilon) viol.push_back(i);
    if (viol.empty()) return;
    switch (method_) {
      case Method::S:
      case Method::SS:
        correct_scalar(viol);
        return;
      default:
        correct_lp(viol);
        return;
    }
  }

  void correct_scalar(const std::vector<int>& viol) {
    const double eps = opt_.epsilon;
    bool tangent_fails = false;
    for (int i : viol) {
      const VertexCache& c = cache_[static_cast<std::size_t>(i)];
      if (c.h - c.g - linear_eval(u_, c.x) < -eps) tangent_fails = true;
    }
    QuadUnderestimator next = u_;
    if (method_ == Method::SS && (tangent_fails || u_.alpha() == 0.0)) {
      next.A.setZero();
      for (int i : viol) {
        const VertexCache& c = cache_[static_cast<std::size_t>(i)];
        const double f = c.h - c.g;
        if (f - (linear_eval(u_, c.x) - next.gamma) < -eps)
          next.gamma = std::max(next.gamma, update_shift_scalar(u_, c.x, f));
      }
      commit(next);
      return;
    }
    if (tangent_fails) throw ShiftRequired{"tangent plane overestimates f beyond tolerance"};
    double alpha = u_.alpha();
    for (int i : viol) {
      const VertexCache& c = cache_[static_cast<std::size_t>(i)];
      const double num = c.h - c.g - linear_eval(u_, c.x);
      const double den = curvature_form(u_, c.x);
      if (std::abs(den) < 1e-14) throw Error(ErrorKind::DegenerateCurvature, "zero curvature along violating direction");
      alpha = std::min(alpha, 2.0 * std::max(num, 0.0) / den);
    }
    next.A = Eigen::MatrixXd::Identity(u_.dim(), u_.dim()) * alpha;
    commit(next);
  }

  void correct_lp(std::vector<int> viol) {
    for (std::size_t guard = 0; !viol.empty(); ++guard) {
      if (guard > 4 * viol.size() + 16) throw Error(ErrorKind::IterationLimit, "corrective LPs do not remove violation");
      auto worst = std::min_element(viol.begin(), viol.end(), [&](int a, int b) {
        return gap(cache_[static_cast<std::size_t>(a)]) < gap(cache_[static_cast<std::size_t>(b)]);
      });
      const VertexCache c = cache_[static_cast<std::size_t>(*worst)];
      solve_update_lp(c.x, c.h - c.g);
      std::vector<int> rest;
      for (int i : viol)
        if (gap(cache_[static_cast<std::size_t>(i)]) < -opt_.epsilon) rest.push_back(i);
      viol = std::move(rest);
    }
  }

  void solve_update_lp(const Eigen::VectorXd& x_star, double f_star) {
    const bool first = !first_lp_done_;
    const LpBuild build =
        build_lp(method_, first, u_, x_star, f_star, LpSampleSet{samples_, sample_f_}, opt_.epsilon);
    if (opt_.on_lp) opt_.on_lp(build);
    const linops::LpSolution sol = linops::solve_lp(build.lp);
    ++rep_.lp_solves;
    first_lp_done_ = true;
    if (sol.status == linops::LpStatus::Infeasible) {
      if (!has_shift(method_)) throw ShiftRequired{"parameter LP infeasible without a shift"};
      throw Error(ErrorKind::InvalidArgument, "shifted parameter LP reported infeasible");
    }
    if (sol.status != linops::LpStatus::Optimal) throw Error(ErrorKind::InvalidArgument, "parameter LP unbounded");
    commit(apply_lp_solution(build, sol, u_));
  }

  const DcFunction& f_;
  Method method_;
  const ConstructOptions& opt_;
  QuadUnderestimator& u_;
  ConstructionReport& rep_;
  std::optional<VertexPolytope> poly_;
  std::vector<VertexCache> cache_;
  std::vector<Eigen::VectorXd> samples_;
  std::vector<double> sample_f_;
  bool first_lp_done_ = false;
  std::uint64_t version_ = 1;
};

}  // namespace

ConstructionResult construct(const DcFunction& f, const Eigen::VectorXd& x0, Method method,
                             const ConstructOptions& options) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  const auto start = std::chrono::steady_clock::now();
  ConstructionResult out;
  const LocalConvexity lc = check_local_convexity(f, x0, options.psd_tol);
  out.report.min_eigenvalue = lc.min_eigenvalue;
  if (!lc.convex) {
    out.report.outcome = Outcome::NotLocallyConvex;
    out.report.failure = "Hessian at x0 has eigenvalue " + expr::format_number(lc.min_eigenvalue);
    out.u.method = method;
    out.u.x0 = x0;
    return out;
  }
  out.u = make_underestimator(lc, x0, method, options.initial_alpha);
  Construction run(f, method, options, out);
  try {
    run.run();
  } catch (const ShiftRequired& s) {
    out.report.outcome = Outcome::ShiftRequired;
    out.report.failure = s.why;
    out.u.converged = false;
  }
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace quadue
