#pragma once

// Explicit vertex/adjacency representation of a bounded polytope that is
// refined one halfspace at a time. Used as the outer approximation of the
// epigraph of a convex function over a box.

#include <vector>

#include <Eigen/Dense>

#include "quadue/dc_function.hpp"

namespace quadue {

// normal . y <= offset
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

struct CutResult {
  // Indices (into the updated vertex list) of the vertices the cut created.
  std::vector<int> new_vertices;
  // For each updated vertex, its index before the cut, or -1 when new.
  std::vector<int> kept_from;
  int removed = 0;
};

class VertexPolytope {
 public:
  // Axis-aligned box in R^D with its 2^D corners. Throws DimensionTooLarge
  // when D > max_dim.
  static VertexPolytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int max_dim = 8);

  // B x [t_lo, t_hi]; the last coordinate is the epigraph variable.
  static VertexPolytope epigraph(const BoxDomain& box, double t_lo, double t_hi, int max_dim = 8);

  int dim() const { return dim_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  // Sorted indices of the halfspaces active at vertex v.
  const std::vector<int>& active(int v) const { return active_[static_cast<std::size_t>(v)]; }
  // Sorted neighbour indices of vertex v.
  const std::vector<int>& neighbours(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int num_edges() const;

  // Intersects with hs. Normalizes hs to unit normal before recording it.
  // Throws EmptyPolytope when the cut leaves no full-dimensional remainder.
  CutResult add_cut(Halfspace hs);

  // Largest violation of any recorded halfspace over all vertices.
  double max_violation() const;

 private:
  VertexPolytope() = default;

  double band(const Halfspace& hs) const;

  int dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  std::vector<Eigen::VectorXd> vertices_;
  std::vector<std::vector<int>> active_;
  std::vector<std::vector<int>> adjacency_;
};

// Reference enumeration: solves every D-subset of the halfspaces and keeps the
// feasible, distinct intersection points. Exponential; for tests only.
std::vector<Eigen::VectorXd> exhaustive_vertices(const std::vector<Halfspace>& halfspaces, int dim,
                                                 double feas_tol = 1e-9, double dedup_tol = 1e-7);

}  // namespace quadue
