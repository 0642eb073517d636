#include <algorithm>
#include <set>

#include "doctest.h"
#include "quadue/error.hpp"
#include "quadue/sampling.hpp"
#include "quadue/vertex_polytope.hpp"

using namespace quadue;
using Eigen::VectorXd;

namespace {

bool same_sets(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b, double tol) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const VectorXd& x) {
    return std::any_of(b.begin(), b.end(), [&](const VectorXd& y) { return (x - y).cwiseAbs().maxCoeff() <= tol; });
  });
}

// Two vertices are adjacent iff they share dim - 1 independent active
// halfspaces and no other vertex has all of those active.
void check_adjacency(const VertexPolytope& p) {
  const int d = p.dim();
  for (int u = 0; u < p.num_vertices(); ++u)
    for (int v = u + 1; v < p.num_vertices(); ++v) {
      std::vector<int> common;
      std::set_intersection(p.active(u).begin(), p.active(u).end(), p.active(v).begin(), p.active(v).end(),
                            std::back_inserter(common));
      Eigen::MatrixXd rows(static_cast<int>(common.size()), d);
      for (int k = 0; k < static_cast<int>(common.size()); ++k)
        rows.row(k) = p.halfspaces()[static_cast<std::size_t>(common[static_cast<std::size_t>(k)])].normal.transpose();
      const bool expect = !common.empty() && Eigen::FullPivLU<Eigen::MatrixXd>(rows).rank() == d - 1;
      const auto& nb = p.neighbours(u);
      const bool got = std::binary_search(nb.begin(), nb.end(), v);
      CHECK(got == expect);
    }
}

}  // namespace

TEST_CASE("box polytope") {
  const auto p = VertexPolytope::box(VectorXd::Constant(3, -1), VectorXd::Constant(3, 2));
  CHECK(p.num_vertices() == 8);
  CHECK(p.num_edges() == 12);
  CHECK(p.halfspaces().size() == 6);
  CHECK_THROWS_AS(VertexPolytope::box(VectorXd::Zero(9), VectorXd::Ones(9)), Error);
}

TEST_CASE("single cut on a square") {
  auto p = VertexPolytope::box(VectorXd::Constant(2, 0), VectorXd::Constant(2, 1));
  VectorXd a(2);
  a << 1, 1;
  const auto r = p.add_cut({a, 1.5});
  CHECK(r.removed == 1);
  CHECK(r.new_vertices.size() == 2);
  CHECK(p.num_vertices() == 5);
  CHECK(p.num_edges() == 5);
  CHECK(p.halfspaces().back().normal.norm() == doctest::Approx(1));
  check_adjacency(p);
}

TEST_CASE("cut through a vertex creates no duplicate") {
  auto p = VertexPolytope::box(VectorXd::Constant(2, 0), VectorXd::Constant(2, 1));
  VectorXd a(2);
  a << 1, 1;
  p.add_cut({a, 1.0});  // diagonal through (1,0) and (0,1)
  CHECK(p.num_vertices() == 3);
  check_adjacency(p);
}

TEST_CASE("cut that removes nothing") {
  auto p = VertexPolytope::box(VectorXd::Constant(2, 0), VectorXd::Constant(2, 1));
  VectorXd a(2);
  a << 1, 0;
  const auto r = p.add_cut({a, 5.0});
  CHECK(r.removed == 0);
  CHECK(p.num_vertices() == 4);
}

TEST_CASE("cut removing everything throws") {
  auto p = VertexPolytope::box(VectorXd::Constant(2, 0), VectorXd::Constant(2, 1));
  VectorXd a(2);
  a << 1, 1;
  CHECK_THROWS_AS(p.add_cut({a, -1.0}), Error);
}

TEST_CASE("random cut sequences match exhaustive enumeration") {
  Rng rng(11);
  for (int s = 0; s < 30; ++s) {
    const int d = 2 + s % 4;
    auto p = VertexPolytope::box(VectorXd::Constant(d, -1), VectorXd::Constant(d, 1));
    for (int k = 0; k < 6; ++k) {
      VectorXd a(d);
      for (int i = 0; i < d; ++i) a[i] = 2 * rng.uniform() - 1;
      a.normalize();
      double reach = -1e300, low = 1e300;
      for (const auto& v : p.vertices()) {
        reach = std::max(reach, a.dot(v));
        low = std::min(low, a.dot(v));
      }
      // Some cuts pass exactly through a vertex to exercise degeneracy.
      const double off = (k % 3 == 2) ? a.dot(p.vertices()[static_cast<std::size_t>(rng.below(p.num_vertices()))])
                                      : (0.3 + 0.5 * rng.uniform()) * reach;
      if (off <= low + 1e-6) continue;
      const auto r = p.add_cut({a, off});
      CHECK(static_cast<int>(r.kept_from.size()) == p.num_vertices());
      CHECK(same_sets(p.vertices(), exhaustive_vertices(p.halfspaces(), d), 1e-7));
      CHECK(p.max_violation() < 1e-9);
    }
    if (d <= 3) check_adjacency(p);
  }
}

TEST_CASE("epigraph polytope") {
  const auto p = VertexPolytope::epigraph(BoxDomain::cube(2, -1, 1), -3, 4);
  CHECK(p.dim() == 3);
  CHECK(p.num_vertices() == 8);
  double tmin = 1e300;
  for (const auto& v : p.vertices()) tmin = std::min(tmin, v[2]);
  CHECK(tmin == -3);
}
