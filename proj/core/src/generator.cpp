#include <algorithm>
#include <cmath>

#include "quadue/error.hpp"
#include "quadue/generator.hpp"
#include "quadue/linops.hpp"

namespace quadue {

double rhs_binary_search(std::vector<double> values, double fraction) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  if (!(fraction >= 0.0 && fraction < 1.0)) throw Error(ErrorKind::InvalidArgument, "fraction must lie in [0, 1)");
  std::sort(values.begin(), values.end(), std::greater<>());
  if (values.front() == values.back()) throw Error(ErrorKind::DegenerateSpread, "constraint body is constant on the sample");
  const auto k = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(values.size())));
  if (k == 0) return values.front();
  // Largest rhs cutting at least k values: just below the k-th largest, or
  // below the end of its tie run.
  for (std::size_t j = k; j < values.size(); ++j)
    if (values[j - 1] > values[j]) return 0.5 * (values[j - 1] + values[j]);
  throw Error(ErrorKind::DegenerateSpread, "cannot cut the requested fraction");
}

double rhs_binary_search(const expr::Expr& body, const std::vector<Eigen::VectorXd>& sample, double fraction) {
  std::vector<double> v;
  v.reserve(sample.size());
  for (const auto& x : sample) v.push_back(expr::eval(body, x));
  return rhs_binary_search(std::move(v), fraction);
}

DcFunction compose_core(const std::vector<int>& tuple, const std::string& name) {
  const int n = static_cast<int>(tuple.size());
  std::vector<expr::Expr> h, g;
  for (int j = 0; j < n; ++j) {
    const DcFunction& c = core_dc(tuple[static_cast<std::size_t>(j)]);
    const int map[1] = {j};
    h.push_back(expr::remap_variables(c.h(), map));
    if (!c.g().is_zero()) g.push_back(expr::remap_variables(c.g(), map));
  }
  if (n > 1) h.push_back(link_term(n));
  auto join = [](std::vector<expr::Expr> v) {
    if (v.empty()) return expr::Expr(0.0);
    return v.size() == 1 ? v.front() : expr::Expr::sum(std::move(v));
  };
  return DcFunction(name, join(std::move(h)), join(std::move(g)), BoxDomain::cube(n, -1.0, 1.0));
}

namespace {

std::vector<std::vector<int>> all_tuples(int n) {
  std::vector<std::vector<int>> out{{}};
  for (int j = 0; j < n; ++j) {
    std::vector<std::vector<int>> next;
    for (const auto& t : out)
      for (int c = 1; c <= 6; ++c) {
        auto u = t;
        u.push_back(c);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

bool nonconvex_on(const DcFunction& f, const std::vector<Eigen::VectorXd>& pts) {
  for (const auto& x : pts)
    if (linops::min_eigenvalue(f.hessian(x)) < -1e-6) return true;
  return false;
}

}  // namespace

ProblemInstance generate_problem(const ProblemSpec& spec) {
  if (spec.n < 1 || spec.n > 4) throw Error(ErrorKind::InvalidArgument, "generated problems need 1 <= n <= 4");
  if (spec.m_linear < 0 || spec.m_convex < 0 || spec.m_dc < 0)
    throw Error(ErrorKind::InvalidArgument, "constraint counts must be nonnegative");
  const int n = spec.n;
  const BoxDomain box = BoxDomain::cube(n, -1.0, 1.0);
  const std::string name = spec.name.empty()
                               ? "gen_" + std::to_string(n) + "_" + std::to_string(spec.m_linear) +
                                     std::to_string(spec.m_convex) + std::to_string(spec.m_dc) + "_" +
                                     std::to_string(spec.seed)
                               : spec.name;
  Rng rng(derive_seed(spec.seed, 0x67656e));
  std::vector<Eigen::VectorXd> sample = latin_hypercube(box, default_sample_size(n), derive_seed(spec.seed, 1)).points;
  const std::vector<Eigen::VectorXd> check = sample;

  auto tuples = all_tuples(n);
  rng.shuffle(tuples);
  std::size_t next_tuple = 0;
  auto next_dc = [&](const std::string& label) {
    while (next_tuple < tuples.size()) {
      DcFunction f = compose_core(tuples[next_tuple++], label);
      if (nonconvex_on(f, check)) return f;
    }
    throw Error(ErrorKind::CatalogExhausted, "not enough core-function compositions for the requested d.c. count");
  };

  ProblemInstance p{name, next_dc(name), {}};
  auto add = [&](ConstraintClass cls, DcFunction body) {
    std::vector<double> values;
    values.reserve(sample.size());
    for (const auto& x : sample) values.push_back(body.value(x));
    const double rhs = rhs_binary_search(values, 0.2);
    std::vector<Eigen::VectorXd> keep;
    for (std::size_t k = 0; k < sample.size(); ++k)
      if (values[k] <= rhs) keep.push_back(sample[k]);
    sample = std::move(keep);
    p.constraints.push_back({cls, std::move(body), rhs});
  };
  int k = 0;
  for (int i = 0; i < spec.m_linear; ++i) {
    std::vector<expr::Expr> terms;
    for (int j = 0; j < n; ++j) terms.push_back(rng.below(2) == 0 ? expr::Expr::variable(j) : -expr::Expr::variable(j));
    const expr::Expr body = n == 1 ? terms.front() : expr::Expr::sum(std::move(terms));
    add(ConstraintClass::Linear, DcFunction(name + ".c" + std::to_string(++k), body, 0.0, box));
  }
  for (int i = 0; i < spec.m_convex; ++i)
    add(ConstraintClass::Convex,
        DcFunction(name + ".c" + std::to_string(++k), sample_convex_body(n, rng, check), 0.0, box));
  for (int i = 0; i < spec.m_dc; ++i) {
    DcFunction body = next_dc(name + ".c" + std::to_string(++k));
    add(ConstraintClass::Dc, std::move(body));
  }
  return p;
}

}  // namespace quadue
