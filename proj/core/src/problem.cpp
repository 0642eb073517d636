#include "quadue/problem.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <sstream>

#include "quadue/embedded_data.hpp"
#include "quadue/error.hpp"

namespace quadue {

std::string_view to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::Linear:
      return "linear";
    case ConstraintClass::Convex:
      return "convex";
    case ConstraintClass::Dc:
      return "dc";
  }
  return "?";
}

ConstraintClass parse_constraint_class(std::string_view tag) {
  if (tag == "linear") return ConstraintClass::Linear;
  if (tag == "convex") return ConstraintClass::Convex;
  if (tag == "dc") return ConstraintClass::Dc;
  throw Error(ErrorKind::ParseError, "unknown constraint class '" + std::string(tag) + "'");
}

bool ProblemInstance::feasible(const Eigen::VectorXd& x, double tol) const {
  for (const auto& c : constraints)
    if (c.body.value(x) > c.rhs + tol) return false;
  return true;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::ParseError, "bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

BoxDomain parse_box(std::string_view s, int n) {
  std::vector<double> lo, hi;
  s = trim(s);
  while (!s.empty()) {
    if (s.front() != '[') throw Error(ErrorKind::ParseError, "box interval must start with '['");
    const auto close = s.find(']');
    if (close == std::string_view::npos) throw Error(ErrorKind::ParseError, "unterminated box interval");
    const auto parts = split(s.substr(1, close - 1), ',');
    if (parts.size() != 2) throw Error(ErrorKind::ParseError, "box interval needs two bounds");
    lo.push_back(parse_double(parts[0]));
    hi.push_back(parse_double(parts[1]));
    s = trim(s.substr(close + 1));
  }
  if (static_cast<int>(lo.size()) != n)
    throw Error(ErrorKind::ParseError, "box has " + std::to_string(lo.size()) + " intervals, expected " + std::to_string(n));
  return BoxDomain(Eigen::Map<Eigen::VectorXd>(lo.data(), n), Eigen::Map<Eigen::VectorXd>(hi.data(), n));
}

std::string format_box(const BoxDomain& box) {
  std::string out;
  for (int i = 0; i < box.dim(); ++i) {
    if (i > 0) out += ' ';
    out += '[' + expr::format_number(box.lower()[i]) + ", " + expr::format_number(box.upper()[i]) + ']';
  }
  return out;
}

// key: value lines of one record, comments and blank lines removed.
struct Field {
  std::string_view key;
  std::string_view value;
  int line;
};

std::vector<std::vector<Field>> records(std::string_view text) {
  std::vector<std::vector<Field>> out(1);
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      if (trim(line.substr(0, hash)).empty()) continue;  // comment-only lines do not end a record
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      if (!out.back().empty()) out.emplace_back();
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'key: value'");
    out.back().push_back({trim(line.substr(0, colon)), trim(line.substr(colon + 1)), line_no});
  }
  if (out.back().empty()) out.pop_back();
  return out;
}

[[noreturn]] void field_error(const Field& f, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(f.line) + " (" + std::string(f.key) + "): " + what);
}

int parse_dim(const Field& f) {
  int n = 0;
  auto res = std::from_chars(f.value.data(), f.value.data() + f.value.size(), n);
  if (res.ec != std::errc() || res.ptr != f.value.data() + f.value.size() || n < 1) field_error(f, "bad dimension");
  return n;
}

expr::Expr parse_expr_field(const Field& f, std::string_view text) {
  try {
    return expr::parse(text);
  } catch (const Error& e) {
    field_error(f, e.what());
  }
}

}  // namespace

std::vector<DcFunction> parse_functions(std::string_view text) {
  std::vector<DcFunction> out;
  for (const auto& rec : records(text)) {
    std::string name;
    int n = 0;
    const Field* box = nullptr;
    std::optional<expr::Expr> h, g;
    for (const auto& f : rec) {
      if (f.key == "name")
        name = f.value;
      else if (f.key == "n")
        n = parse_dim(f);
      else if (f.key == "box")
        box = &f;
      else if (f.key == "h")
        h = parse_expr_field(f, f.value);
      else if (f.key == "g")
        g = parse_expr_field(f, f.value);
      else
        field_error(f, "unknown key");
    }
    if (name.empty() || n == 0 || box == nullptr || !h)
      throw Error(ErrorKind::ParseError, "function record near line " + std::to_string(rec.front().line) +
                                              " needs name, n, box and h");
    out.emplace_back(name, *h, g.value_or(expr::Expr(0.0)), parse_box(box->value, n));
  }
  return out;
}

std::string format_function(const DcFunction& f) {
  std::ostringstream os;
  os << "name: " << f.name() << "\n"
     << "n: " << f.dim() << "\n"
     << "box: " << format_box(f.box()) << "\n"
     << "h: " << expr::to_string(f.h()) << "\n"
     << "g: " << expr::to_string(f.g()) << "\n";
  return os.str();
}

ProblemInstance parse_problem(std::string_view text) {
  const auto recs = records(text);
  if (recs.size() != 1) throw Error(ErrorKind::ParseError, "a problem file holds exactly one record");
  std::string name;
  int n = 0;
  const Field* box_field = nullptr;
  const Field* objective = nullptr;
  std::vector<const Field*> cons;
  for (const auto& f : recs.front()) {
    if (f.key == "name")
      name = f.value;
    else if (f.key == "n")
      n = parse_dim(f);
    else if (f.key == "box")
      box_field = &f;
    else if (f.key == "objective")
      objective = &f;
    else if (f.key == "constraint")
      cons.push_back(&f);
    else
      field_error(f, "unknown key");
  }
  if (name.empty() || n == 0 || box_field == nullptr || objective == nullptr)
    throw Error(ErrorKind::ParseError, "problem needs name, n, box and objective");
  const BoxDomain box = parse_box(box_field->value, n);
  const auto obj = split(objective->value, '|');
  if (obj.size() != 2) field_error(*objective, "expected 'h | g'");
  ProblemInstance p{name, DcFunction(name, parse_expr_field(*objective, obj[0]), parse_expr_field(*objective, obj[1]), box), {}};
  int k = 0;
  for (const Field* c : cons) {
    const auto parts = split(c->value, '|');
    if (parts.size() != 4) field_error(*c, "expected 'class | h | g | rhs'");
    ConstraintClass cls;
    try {
      cls = parse_constraint_class(parts[0]);
    } catch (const Error& e) {
      field_error(*c, e.what());
    }
    DcFunction body(name + ".c" + std::to_string(++k), parse_expr_field(*c, parts[1]), parse_expr_field(*c, parts[2]), box);
    if (cls != ConstraintClass::Dc && !body.convex()) field_error(*c, "linear and convex constraints take g = 0");
    p.constraints.push_back({cls, std::move(body), parse_double(parts[3])});
  }
  return p;
}

std::string format_problem(const ProblemInstance& p) {
  std::ostringstream os;
  os << "name: " << p.name << "\n"
     << "n: " << p.dim() << "\n"
     << "box: " << format_box(p.box()) << "\n"
     << "objective: " << expr::to_string(p.objective.h()) << " | " << expr::to_string(p.objective.g()) << "\n";
  for (const auto& c : p.constraints)
    os << "constraint: " << to_string(c.cls) << " | " << expr::to_string(c.body.h()) << " | "
       << expr::to_string(c.body.g()) << " | " << expr::format_number(c.rhs) << "\n";
  return os.str();
}

namespace {

std::string_view embedded(std::string_view path) {
  for (const auto& f : data::files())
    if (f.path == path) return f.text;
  throw Error(ErrorKind::InvalidArgument, "no embedded data file '" + std::string(path) + "'");
}

}  // namespace

std::vector<DcFunction> raw_coconut_functions() { return parse_functions(embedded("coconut.txt")); }

const std::vector<DcFunction>& coconut_functions() {
  static const std::vector<DcFunction> fns = [] {
    std::vector<DcFunction> out;
    for (const auto& f : raw_coconut_functions()) out.push_back(scale_range(f, default_range_density(f.dim())));
    return out;
  }();
  return fns;
}

const DcFunction& coconut_function(std::string_view name) {
  for (const auto& f : coconut_functions())
    if (f.name() == name) return f;
  throw Error(ErrorKind::InvalidArgument, "unknown function '" + std::string(name) + "'");
}

const DcFunction& core_dc(int i) {
  static const std::vector<DcFunction> fns = parse_functions(embedded("core_dc.txt"));
  if (i < 1 || i > static_cast<int>(fns.size())) throw Error(ErrorKind::InvalidArgument, "core function index out of range");
  return fns[static_cast<std::size_t>(i - 1)];
}

expr::Expr link_term(int p) {
  if (p < 1) throw Error(ErrorKind::InvalidArgument, "link term needs p >= 1");
  std::vector<expr::Expr> xs;
  for (int j = 0; j < p; ++j) xs.push_back(expr::Expr::variable(j));
  const expr::Expr s = p == 1 ? xs.front() : expr::Expr::sum(std::move(xs));
  return expr::pow(s, 4.0) / expr::Expr(2.0 * p);
}

const std::vector<ProblemInstance>& appendix_problems() {
  static const std::vector<ProblemInstance> probs = [] {
    std::vector<std::pair<std::string_view, std::string_view>> files;
    for (const auto& f : data::files())
      if (f.path.starts_with("problems/")) files.emplace_back(f.path, f.text);
    std::sort(files.begin(), files.end());
    std::vector<ProblemInstance> out;
    for (const auto& [path, text] : files) out.push_back(parse_problem(text));
    return out;
  }();
  return probs;
}

}  // namespace quadue
