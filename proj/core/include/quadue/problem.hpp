#pragma once

// Benchmark functions, d.c. problems and their text formats.
//
// Function file: records separated by blank lines, '#' starts a comment.
//   name: zy2
//   n: 1
//   box: [0, 8]
//   h: x1^3
//   g: 6*x1^2
//
// Problem file: one problem per file.
//   name: p07
//   n: 2
//   box: [-1, 1] [-1, 1]
//   objective: <h> | <g>
//   constraint: linear|convex|dc | <h> | <g> | <rhs>     meaning h - g <= rhs

#include <string>
#include <string_view>
#include <vector>

#include "quadue/dc_function.hpp"

namespace quadue {

enum class ConstraintClass { Linear, Convex, Dc };

std::string_view to_string(ConstraintClass c);
ConstraintClass parse_constraint_class(std::string_view tag);

struct Constraint {
  ConstraintClass cls;
  DcFunction body;
  double rhs = 0.0;
};

struct ProblemInstance {
  std::string name;
  DcFunction objective;
  std::vector<Constraint> constraints;

  int dim() const { return objective.dim(); }
  const BoxDomain& box() const { return objective.box(); }
  // All constraints hold within tol at x.
  bool feasible(const Eigen::VectorXd& x, double tol = 0.0) const;
};

std::vector<DcFunction> parse_functions(std::string_view text);
std::string format_function(const DcFunction& f);

ProblemInstance parse_problem(std::string_view text);
std::string format_problem(const ProblemInstance& p);

// The ten test functions, range-scaled to [-1, 1].
const std::vector<DcFunction>& coconut_functions();
// Same functions without scaling.
std::vector<DcFunction> raw_coconut_functions();
// Looks a function up by name in the scaled set. Throws InvalidArgument.
const DcFunction& coconut_function(std::string_view name);

// Core univariate d.c. functions f1..f6 on [-1, 1] in variable x1.
const DcFunction& core_dc(int i);
// (x1 + ... + xp)^4 / (2p)
expr::Expr link_term(int p);

// The 24 shipped problems, six per dimension 1..4.
const std::vector<ProblemInstance>& appendix_problems();

}  // namespace quadue
