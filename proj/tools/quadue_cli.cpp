// quadue: construct quadratic underestimators, run the method and bound
// studies, and generate or print benchmark problems.
//
// Exit codes: 0 success, 1 usage error, 2 point not locally convex,
// 3 shift required, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "quadue/construct.hpp"
#include "quadue/error.hpp"
#include "quadue/generator.hpp"
#include "quadue/metric.hpp"
#include "quadue/problem.hpp"
#include "quadue/studies.hpp"

namespace fs = std::filesystem;
using namespace quadue;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNotConvex = 2, kShift = 3, kNumerical = 4 };

struct Common {
  std::uint64_t seed = 0;
  double epsilon = 1e-3;
  int jobs = 0;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(parse_method(tok));
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty method list");
  return out;
}

// Scaled benchmark function or core function by name.
DcFunction named_function(const std::string& name) {
  for (int i = 1; i <= 6; ++i)
    if (core_dc(i).name() == name) return core_dc(i);
  return coconut_function(name);
}

// --- construct -------------------------------------------------------------

struct ConstructArgs {
  std::string fn;
  std::string file;
  std::vector<double> x0;
  std::string method = "S";
  int sample_size = 0;
  bool scale = false;
  std::string surface;
  int surface_points = 201;
  std::string dump_lp;
};

std::string surface_csv(const DcFunction& f, const QuadUnderestimator& u, int per_dim) {
  QuadUnderestimator lin = u;
  lin.A.setZero();
  lin.gamma = 0.0;
  std::ostringstream os;
  for (int i = 0; i < f.dim(); ++i) os << 'x' << i + 1 << ',';
  os << "f,l,q\n";
  const int n = f.dim();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (bool done = false; !done;) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d)
      x[d] = f.box().lower()[d] + f.box().width()[d] * idx[static_cast<std::size_t>(d)] / (per_dim - 1.0);
    for (int d = 0; d < n; ++d) os << csv_number(x[d], 6) << ',';
    os << csv_number(f.value(x), 8) << ',' << csv_number(q_eval(lin, x), 8) << ',' << csv_number(q_eval(u, x), 8) << '\n';
    done = true;
    for (int d = 0; d < n; ++d) {
      if (++idx[static_cast<std::size_t>(d)] < per_dim) {
        done = false;
        break;
      }
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
  return os.str();
}

int cmd_construct(const Common& c, const ConstructArgs& a) {
  if (a.fn.empty() == a.file.empty()) throw CLI::ValidationError("construct", "give exactly one of --fn or --file");
  DcFunction f = a.fn.empty() ? parse_functions(read_file(a.file)).at(0) : named_function(a.fn);
  if (a.scale) f = scale_range(f, default_range_density(f.dim()));
  if (static_cast<int>(a.x0.size()) != f.dim())
    throw CLI::ValidationError("--x0", "expected " + std::to_string(f.dim()) + " coordinates");
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(a.x0.data(), f.dim());
  const Method m = parse_method(a.method);

  ConstructOptions opt;
  opt.epsilon = c.epsilon;
  opt.seed = c.seed;
  opt.sample_size = a.sample_size;
  std::string lp_dump;
  if (!a.dump_lp.empty())
    opt.on_lp = [&](const LpBuild& b) { lp_dump += linops::dump_lp(b.lp) + "\n"; };
  const ConstructionResult r = construct(f, x0, m, opt);

  nlohmann::json j;
  j["function"] = f.name();
  j["outcome"] = std::string(to_string(r.report.outcome));
  j["iterations"] = r.report.iterations;
  j["vertices"] = r.report.vertices_enumerated;
  j["lp_solves"] = r.report.lp_solves;
  j["min_eigenvalue"] = r.report.min_eigenvalue;
  if (!r.report.failure.empty()) j["failure"] = r.report.failure;
  if (r.report.outcome != Outcome::NotLocallyConvex) {
    j["underestimator"] = nlohmann::json::parse(to_json(r.u));
    if (r.converged()) {
      try {
        j["metric"] = metric(r.u, MetricIntegrator(f, c.seed)).value;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateDenominator) throw;
      }
    }
  }
  const std::string text = j.dump(2) + "\n";
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text);
  if (!a.dump_lp.empty()) write_file(a.dump_lp, lp_dump);
  if (!a.surface.empty() && r.report.outcome != Outcome::NotLocallyConvex)
    write_file(a.surface, surface_csv(f, r.u, a.surface_points));

  switch (r.report.outcome) {
    case Outcome::Converged:
      return kOk;
    case Outcome::NotLocallyConvex:
      return kNotConvex;
    case Outcome::ShiftRequired:
      return kShift;
    case Outcome::IterationLimit:
      return kNumerical;
  }
  return kNumerical;
}

// --- studies ---------------------------------------------------------------

struct HierarchyArgs {
  std::string methods = "S,SS,UDS,D,DS,M,MS";
  std::vector<std::string> functions;
  int points = 25;
  int sample_size = 0;
  int metric_points = 0;
};

int cmd_hierarchy(const Common& c, const HierarchyArgs& a) {
  HierarchyOptions o;
  o.seed = c.seed;
  o.epsilon = c.epsilon;
  o.jobs = c.jobs;
  o.methods = parse_methods(a.methods);
  o.points_per_function = a.points;
  o.sample_size = a.sample_size;
  o.metric_points = a.metric_points;
  std::vector<DcFunction> fns;
  if (a.functions.empty())
    fns = coconut_functions();
  else
    for (const auto& name : a.functions) fns.push_back(named_function(name));
  const HierarchyStudy study = run_hierarchy_study(fns, o);
  const std::string summary = hierarchy_summary_csv(aggregate(study));
  const fs::path dir = c.out.empty() ? fs::path("hierarchy") : fs::path(c.out);
  write_file(dir / "group1.csv", hierarchy_csv(study, 1));
  write_file(dir / "group2.csv", hierarchy_csv(study, 2));
  write_file(dir / "summary.csv", summary);
  write_file(dir / "timing.csv", hierarchy_timing_csv(study));
  std::cout << summary;
  return kOk;
}

struct BoundArgs {
  std::string problems;
  int per_dim = 4;
  std::string method = "DS";
};

std::vector<ProblemInstance> load_problems(const std::string& dir) {
  if (dir.empty()) return appendix_problems();
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ProblemInstance> out;
  for (const auto& p : files) out.push_back(parse_problem(read_file(p.string())));
  return out;
}

int cmd_bound(const Common& c, const BoundArgs& a) {
  BoundStudyOptions o;
  o.jobs = c.jobs;
  o.relaxation.seed = c.seed;
  o.relaxation.epsilon = c.epsilon;
  o.relaxation.per_dim = a.per_dim;
  o.relaxation.method = parse_method(a.method);
  const auto rows = run_bound_study(load_problems(a.problems), o);
  const std::string table = bound_csv(rows);
  const fs::path dir = c.out.empty() ? fs::path("bounds") : fs::path(c.out);
  write_file(dir / "bounds.csv", table);
  write_file(dir / "timing.csv", bound_timing_csv(rows));
  std::cout << table;
  return kOk;
}

struct GenArgs {
  int n = 2;
  int linear = -1;
  int convex = 1;
  int dc = 1;
  int count = 1;
};

int cmd_gen(const Common& c, const GenArgs& a) {
  const fs::path dir = c.out.empty() ? fs::path("problems") : fs::path(c.out);
  for (int k = 0; k < a.count; ++k) {
    ProblemSpec s;
    s.n = a.n;
    s.m_linear = a.linear >= 0 ? a.linear : (a.n > 1 ? 1 : 0);
    s.m_convex = a.convex;
    s.m_dc = a.dc;
    s.seed = derive_seed(c.seed, static_cast<std::uint64_t>(k));
    char name[32];
    std::snprintf(name, sizeof(name), "gen%d_%03d", a.n, k + 1);
    s.name = name;
    const ProblemInstance p = generate_problem(s);
    write_file(dir / (s.name + ".txt"), format_problem(p));
    std::cout << (dir / (s.name + ".txt")).string() << "\n";
  }
  return kOk;
}

int cmd_dump(const std::string& what, bool scaled) {
  if (what == "functions") {
    const auto fns = scaled ? coconut_functions() : raw_coconut_functions();
    for (std::size_t i = 0; i < fns.size(); ++i) std::cout << (i ? "\n" : "") << format_function(fns[i]);
  } else if (what == "core") {
    for (int i = 1; i <= 6; ++i) std::cout << (i > 1 ? "\n" : "") << format_function(core_dc(i));
  } else if (what == "problems") {
    const auto& ps = appendix_problems();
    for (std::size_t i = 0; i < ps.size(); ++i) std::cout << (i ? "\n" : "") << format_problem(ps[i]);
  } else {
    throw CLI::ValidationError("dump", "expected functions, core or problems");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex quadratic underestimators for d.c. functions"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Base seed for all random draws");
  app.add_option("--epsilon", common.epsilon, "Cutting-plane convergence tolerance")->check(CLI::PositiveNumber);
  app.add_option("--jobs", common.jobs, "Worker threads for studies (0 = all cores)");
  app.add_option("--out", common.out, "Output file (construct) or directory (studies)");

  ConstructArgs ca;
  auto* construct_cmd = app.add_subcommand("construct", "Build one underestimator and print it as JSON");
  construct_cmd->add_option("--fn", ca.fn, "Shipped function name (scaled benchmark or core f1..f6)");
  construct_cmd->add_option("--file", ca.file, "Function file; the first record is used");
  construct_cmd->add_option("--x0", ca.x0, "Point of construction, comma separated")->required()->delimiter(',');
  construct_cmd->add_option("--method", ca.method, "S, SS, UDS, D, DS, M or MS");
  construct_cmd->add_option("--sample-size", ca.sample_size, "LP sample size (default 100 n)");
  construct_cmd->add_flag("--scale", ca.scale, "Range-scale a function read from --file");
  construct_cmd->add_option("--surface", ca.surface, "Write f, tangent and q on a grid to this CSV");
  construct_cmd->add_option("--surface-points", ca.surface_points, "Grid points per dimension")->check(CLI::Range(2, 100000));
  construct_cmd->add_option("--dump-lp", ca.dump_lp, "Write every parameter LP to this file");

  HierarchyArgs ha;
  auto* hier_cmd = app.add_subcommand("hierarchy-study", "Compare all methods at locally convex points");
  hier_cmd->add_option("--methods", ha.methods, "Comma-separated method list");
  hier_cmd->add_option("--functions", ha.functions, "Restrict to these functions")->delimiter(',');
  hier_cmd->add_option("--points", ha.points, "Points of construction per function")->check(CLI::PositiveNumber);
  hier_cmd->add_option("--sample-size", ha.sample_size, "LP sample size (default 100 n)");
  hier_cmd->add_option("--metric-points", ha.metric_points, "Quadrature size override");

  BoundArgs ba;
  auto* bound_cmd = app.add_subcommand("bound-study", "Root-node bounds of quadratic and linear relaxations");
  bound_cmd->add_option("--problems", ba.problems, "Directory of problem files (default: shipped set)");
  bound_cmd->add_option("--per-dim", ba.per_dim, "Underestimators per dimension and function")->check(CLI::PositiveNumber);
  bound_cmd->add_option("--method", ba.method, "Method for the quadratic relaxation");

  GenArgs ga;
  auto* gen_cmd = app.add_subcommand("gen-problems", "Generate random d.c. problems");
  gen_cmd->add_option("--n", ga.n, "Dimension 1..4")->check(CLI::Range(1, 4));
  gen_cmd->add_option("--linear", ga.linear, "Linear constraints (default 1 when n > 1)");
  gen_cmd->add_option("--convex", ga.convex, "Convex constraints");
  gen_cmd->add_option("--dc", ga.dc, "d.c. constraints");
  gen_cmd->add_option("--count", ga.count, "Number of problems")->check(CLI::PositiveNumber);

  std::string dump_what = "functions";
  bool dump_scaled = false;
  auto* dump_cmd = app.add_subcommand("dump", "Print shipped data in text form");
  dump_cmd->add_option("what", dump_what, "functions, core or problems");
  dump_cmd->add_flag("--scaled", dump_scaled, "Print range-scaled benchmark functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*construct_cmd) return cmd_construct(common, ca);
    if (*hier_cmd) return cmd_hierarchy(common, ha);
    if (*bound_cmd) return cmd_bound(common, ba);
    if (*gen_cmd) return cmd_gen(common, ga);
    if (*dump_cmd) return cmd_dump(dump_what, dump_scaled);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::InvalidArgument:
      case ErrorKind::InvalidConfig:
        return kUsage;
      default:
        return kNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
