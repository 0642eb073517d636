#include "quadue/vertex_polytope.hpp"

#include <algorithm>
#include <cmath>

#include "quadue/error.hpp"

namespace quadue {

namespace {

constexpr double kBand = 1e-9;

enum class Side { In, On, Out };

bool is_subset(const std::vector<int>& small, const std::vector<int>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void intersect_into(const std::vector<int>& a, const std::vector<int>& b, std::vector<int>& out) {
  out.clear();
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
}

void merge_into(std::vector<int>& dst, const std::vector<int>& src) {
  std::vector<int> out;
  std::set_union(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(out));
  dst = std::move(out);
}

void insert_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

bool same_point(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double scale = 1.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) scale = std::max(scale, 1.0 + std::abs(a[i]));
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kBand * scale) return false;
  return true;
}

}  // namespace

VertexPolytope VertexPolytope::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int max_dim) {
  const int d = static_cast<int>(lower.size());
  if (d > max_dim)
    throw Error(ErrorKind::DimensionTooLarge, "polytope dimension " + std::to_string(d) + " exceeds cap " + std::to_string(max_dim));
  if (d == 0 || upper.size() != d) throw Error(ErrorKind::InvalidArgument, "box bounds must be nonempty and of equal length");
  for (int i = 0; i < d; ++i)
    if (!(lower[i] < upper[i])) throw Error(ErrorKind::InvalidArgument, "degenerate box");

  VertexPolytope p;
  p.dim_ = d;
  for (int i = 0; i < d; ++i) {
    Halfspace up{Eigen::VectorXd::Unit(d, i), upper[i]};
    Halfspace lo{-Eigen::VectorXd::Unit(d, i), -lower[i]};
    p.halfspaces_.push_back(up);
    p.halfspaces_.push_back(lo);
  }
  const unsigned count = 1u << d;
  for (unsigned mask = 0; mask < count; ++mask) {
    Eigen::VectorXd y(d);
    std::vector<int> act;
    for (int i = 0; i < d; ++i) {
      const bool hi = (mask >> i) & 1u;
      y[i] = hi ? upper[i] : lower[i];
      act.push_back(hi ? 2 * i : 2 * i + 1);
    }
    std::sort(act.begin(), act.end());
    std::vector<int> nbr;
    for (int i = 0; i < d; ++i) nbr.push_back(static_cast<int>(mask ^ (1u << i)));
    std::sort(nbr.begin(), nbr.end());
    p.vertices_.push_back(std::move(y));
    p.active_.push_back(std::move(act));
    p.adjacency_.push_back(std::move(nbr));
  }
  return p;
}

VertexPolytope VertexPolytope::epigraph(const BoxDomain& box, double t_lo, double t_hi, int max_dim) {
  if (!(t_lo < t_hi)) throw Error(ErrorKind::InvalidArgument, "epigraph bounds need t_lo < t_hi");
  const int n = box.dim();
  Eigen::VectorXd lo(n + 1), hi(n + 1);
  lo << box.lower(), t_lo;
  hi << box.upper(), t_hi;
  return VertexPolytope::box(lo, hi, max_dim);
}

int VertexPolytope::num_edges() const {
  std::size_t total = 0;
  for (const auto& nb : adjacency_) total += nb.size();
  return static_cast<int>(total / 2);
}

double VertexPolytope::band(const Halfspace& hs) const { return kBand * (1.0 + std::abs(hs.offset)); }

double VertexPolytope::max_violation() const {
  double worst = 0.0;
  for (const auto& y : vertices_)
    for (const auto& hs : halfspaces_) worst = std::max(worst, hs.normal.dot(y) - hs.offset);
  return worst;
}

CutResult VertexPolytope::add_cut(Halfspace hs) {
  if (hs.normal.size() != dim_) throw Error(ErrorKind::InvalidArgument, "halfspace dimension mismatch");
  const double norm = hs.normal.norm();
  if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(hs.offset))
    throw Error(ErrorKind::InvalidArgument, "halfspace normal must be finite and nonzero");
  hs.normal /= norm;
  hs.offset /= norm;

  const int nv = num_vertices();
  const double tol = band(hs);
  std::vector<double> val(static_cast<std::size_t>(nv));
  std::vector<Side> side(static_cast<std::size_t>(nv));
  int outs = 0, ins = 0;
  for (int v = 0; v < nv; ++v) {
    const double s = hs.normal.dot(vertices_[static_cast<std::size_t>(v)]) - hs.offset;
    val[static_cast<std::size_t>(v)] = s;
    side[static_cast<std::size_t>(v)] = s > tol ? Side::Out : (s < -tol ? Side::In : Side::On);
    outs += s > tol;
    ins += s < -tol;
  }

  CutResult result;
  if (outs == 0) {
    const bool duplicate = std::any_of(halfspaces_.begin(), halfspaces_.end(), [&](const Halfspace& h) {
      return (h.normal - hs.normal).cwiseAbs().maxCoeff() <= 1e-12 && std::abs(h.offset - hs.offset) <= tol;
    });
    if (!duplicate) {
      const int k = static_cast<int>(halfspaces_.size());
      halfspaces_.push_back(hs);
      for (int v = 0; v < nv; ++v)
        if (side[static_cast<std::size_t>(v)] == Side::On) insert_sorted(active_[static_cast<std::size_t>(v)], k);
    }
    result.kept_from.resize(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) result.kept_from[static_cast<std::size_t>(v)] = v;
    return result;
  }
  if (ins == 0) throw Error(ErrorKind::EmptyPolytope, "cut leaves no full-dimensional remainder");

  const int k = static_cast<int>(halfspaces_.size());
  halfspaces_.push_back(hs);
  auto sd = [&](int v) { return side[static_cast<std::size_t>(v)]; };

  // Intersection points on the cut edges, computed before storage is
  // compacted. Coincident points (several cut edges meeting the plane at one
  // spot) are merged.
  struct Fresh {
    Eigen::VectorXd y;
    std::vector<int> act;
    std::vector<int> in_nbrs;  // old indices
  };
  std::vector<Fresh> fresh;
  std::vector<int> on_old;
  for (int v = 0; v < nv; ++v)
    if (sd(v) == Side::On) on_old.push_back(v);
  // Active sets and in-neighbours picked up by on-vertices that coincide with
  // an intersection point.
  std::vector<std::vector<int>> on_extra(on_old.size());
  std::vector<std::vector<int>> on_links(on_old.size());
  for (int u = 0; u < nv; ++u) {
    if (sd(u) != Side::Out) continue;
    const Eigen::VectorXd& yu = vertices_[static_cast<std::size_t>(u)];
    for (int w : adjacency_[static_cast<std::size_t>(u)]) {
      if (sd(w) != Side::In) continue;
      const Eigen::VectorXd& yw = vertices_[static_cast<std::size_t>(w)];
      const double su = val[static_cast<std::size_t>(u)];
      const double sw = val[static_cast<std::size_t>(w)];
      const Eigen::VectorXd p = yu + (su / (su - sw)) * (yw - yu);
      std::vector<int> inherited = intersect(active_[static_cast<std::size_t>(u)], active_[static_cast<std::size_t>(w)]);
      insert_sorted(inherited, k);

      bool placed = false;
      for (std::size_t i = 0; i < on_old.size() && !placed; ++i) {
        if (!same_point(vertices_[static_cast<std::size_t>(on_old[i])], p)) continue;
        merge_into(on_extra[i], inherited);
        on_links[i].push_back(w);
        placed = true;
      }
      for (std::size_t i = 0; i < fresh.size() && !placed; ++i) {
        if (!same_point(fresh[i].y, p)) continue;
        merge_into(fresh[i].act, inherited);
        fresh[i].in_nbrs.push_back(w);
        placed = true;
      }
      // A halfspace tight somewhere inside the edge is tight along all of
      // it, so the endpoints already carry every active index.
      if (!placed) fresh.push_back({p, std::move(inherited), {w}});
    }
  }

  // Compact survivors in place, keeping their order.
  std::vector<int> remap(static_cast<std::size_t>(nv), -1);
  int kept = 0;
  for (int v = 0; v < nv; ++v) {
    if (sd(v) == Side::Out) continue;
    remap[static_cast<std::size_t>(v)] = kept;
    result.kept_from.push_back(v);
    if (kept != v) {
      vertices_[static_cast<std::size_t>(kept)] = std::move(vertices_[static_cast<std::size_t>(v)]);
      active_[static_cast<std::size_t>(kept)] = std::move(active_[static_cast<std::size_t>(v)]);
      adjacency_[static_cast<std::size_t>(kept)] = std::move(adjacency_[static_cast<std::size_t>(v)]);
    }
    ++kept;
  }
  vertices_.resize(static_cast<std::size_t>(kept));
  active_.resize(static_cast<std::size_t>(kept));
  adjacency_.resize(static_cast<std::size_t>(kept));
  for (int a = 0; a < kept; ++a) {
    const int v = result.kept_from[static_cast<std::size_t>(a)];
    auto& nb = adjacency_[static_cast<std::size_t>(a)];
    // Edges to removed vertices vanish; edges inside the new facet are
    // rebuilt below. Remapping preserves sortedness.
    std::size_t out = 0;
    for (int w : nb) {
      const int b = remap[static_cast<std::size_t>(w)];
      if (b < 0 || (sd(v) == Side::On && sd(w) == Side::On)) continue;
      nb[out++] = b;
    }
    nb.resize(out);
  }

  std::vector<int> facet;
  for (std::size_t i = 0; i < on_old.size(); ++i) {
    const int a = remap[static_cast<std::size_t>(on_old[i])];
    auto& act = active_[static_cast<std::size_t>(a)];
    insert_sorted(act, k);
    merge_into(act, on_extra[i]);
    facet.push_back(a);
  }
  auto link = [&](int a, int b) {
    insert_sorted(adjacency_[static_cast<std::size_t>(a)], b);
    insert_sorted(adjacency_[static_cast<std::size_t>(b)], a);
  };
  for (auto& fr : fresh) {
    const int id = static_cast<int>(vertices_.size());
    vertices_.push_back(std::move(fr.y));
    active_.push_back(std::move(fr.act));
    adjacency_.emplace_back();
    facet.push_back(id);
    result.new_vertices.push_back(id);
    result.kept_from.push_back(-1);
    for (int w : fr.in_nbrs) link(id, remap[static_cast<std::size_t>(w)]);
  }
  for (std::size_t i = 0; i < on_old.size(); ++i)
    for (int w : on_links[i]) link(remap[static_cast<std::size_t>(on_old[i])], remap[static_cast<std::size_t>(w)]);

  // Combinatorial adjacency test inside the facet: a and b span an edge iff
  // no third vertex is tight on every halfspace tight at both.
  std::vector<int> common;
  for (std::size_t i = 0; i < facet.size(); ++i) {
    for (std::size_t j = i + 1; j < facet.size(); ++j) {
      const int a = facet[i];
      const int b = facet[j];
      intersect_into(active_[static_cast<std::size_t>(a)], active_[static_cast<std::size_t>(b)], common);
      if (static_cast<int>(common.size()) < dim_ - 1) continue;
      bool edge = true;
      for (int z : facet) {
        if (z == a || z == b) continue;
        if (is_subset(common, active_[static_cast<std::size_t>(z)])) {
          edge = false;
          break;
        }
      }
      if (edge) link(a, b);
    }
  }

  result.removed = outs;
  return result;
}

std::vector<Eigen::VectorXd> exhaustive_vertices(const std::vector<Halfspace>& halfspaces, int dim, double feas_tol,
                                                 double dedup_tol) {
  std::vector<Eigen::VectorXd> out;
  const int m = static_cast<int>(halfspaces.size());
  if (m < dim) return out;
  std::vector<int> pick(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) pick[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd a(dim, dim);
  Eigen::VectorXd b(dim);
  for (;;) {
    for (int r = 0; r < dim; ++r) {
      const Halfspace& hs = halfspaces[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      a.row(r) = hs.normal.transpose();
      b[r] = hs.offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() == dim) {
      const Eigen::VectorXd y = lu.solve(b);
      const bool feasible = std::all_of(halfspaces.begin(), halfspaces.end(), [&](const Halfspace& hs) {
        return hs.normal.dot(y) - hs.offset <= feas_tol * (1.0 + std::abs(hs.offset)) * hs.normal.norm();
      });
      if (feasible) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Eigen::VectorXd& z) {
          return (z - y).cwiseAbs().maxCoeff() <= dedup_tol;
        });
        if (!seen) out.push_back(y);
      }
    }
    int i = dim - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - dim + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < dim; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace quadue
