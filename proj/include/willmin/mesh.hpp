#pragma once

// Triangle-mesh data model and topology: validation, oriented one-rings,
// edge tables, midpoint subdivision, sphere inversion, symmetry deviation.
// Downstream modules assume a closed, consistently oriented 2-manifold;
// validate() reports (rather than throws) every way a mesh can fail that.

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "willmin/common.hpp"

namespace willmin {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<Index, 3>> faces;  // ccw seen from outside

  Index vertex_count() const { return static_cast<Index>(vertices.size()); }
  Index face_count() const { return static_cast<Index>(faces.size()); }
};

inline double bbox_diagonal(const TriMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const Vec3& p : mesh.vertices) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  return norm(hi - lo);
}

// ---------------------------------------------------------------------------
// Validation.

struct ValidationReport {
  Index vertex_count = 0;
  Index face_count = 0;
  Index edge_count = 0;  // undirected
  int components = 0;    // over vertices referenced by faces
  int genus = -1;        // -1 while undefined (defects, open, or disconnected)
  bool closed = false;
  bool manifold = false;
  bool oriented = false;

  std::vector<Index> degenerate_faces;                 // repeated vertex index (fatal)
  std::vector<Index> out_of_range_faces;               // fatal
  std::vector<std::array<Index, 2>> open_edges;        // boundary
  std::vector<std::array<Index, 2>> nonmanifold_edges; // >2 incident faces
  std::vector<std::array<Index, 2>> misoriented_edges; // traversed twice in one direction
  std::vector<Index> zero_area_faces;                  // flagged, not fatal

  // Geometric degeneracy is allowed (zero-area faces occur in limit sweeps);
  // everything else listed above disqualifies the mesh.
  bool ok() const {
    return degenerate_faces.empty() && out_of_range_faces.empty() && open_edges.empty() &&
           nonmanifold_edges.empty() && misoriented_edges.empty();
  }
};

namespace detail {

struct DirectedEdge {
  Index lo, hi;   // undirected key, lo < hi
  bool forward;   // true when traversed lo -> hi
};

inline bool face_combinatorially_ok(const std::array<Index, 3>& f, Index nv) {
  if (f[0] < 0 || f[1] < 0 || f[2] < 0 || f[0] >= nv || f[1] >= nv || f[2] >= nv) return false;
  return true;
}

}  // namespace detail

inline ValidationReport validate(const TriMesh& mesh) {
  ValidationReport rep;
  rep.vertex_count = mesh.vertex_count();
  rep.face_count = mesh.face_count();

  std::vector<detail::DirectedEdge> dir;
  dir.reserve(static_cast<std::size_t>(mesh.faces.size()) * 3);
  for (Index f = 0; f < rep.face_count; ++f) {
    const auto& fv = mesh.faces[static_cast<std::size_t>(f)];
    if (!detail::face_combinatorially_ok(fv, rep.vertex_count)) {
      rep.out_of_range_faces.push_back(f);
      continue;
    }
    if (fv[0] == fv[1] || fv[1] == fv[2] || fv[2] == fv[0]) {
      rep.degenerate_faces.push_back(f);
      continue;
    }
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(fv[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(fv[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(fv[2])];
    if (norm2(cross(b - a, c - a)) == 0.0) rep.zero_area_faces.push_back(f);
    for (int k = 0; k < 3; ++k) {
      const Index u = fv[static_cast<std::size_t>(k)];
      const Index v = fv[static_cast<std::size_t>((k + 1) % 3)];
      dir.push_back({std::min(u, v), std::max(u, v), u < v});
    }
  }

  std::sort(dir.begin(), dir.end(), [](const auto& x, const auto& y) {
    return x.lo != y.lo ? x.lo < y.lo : x.hi < y.hi;
  });

  for (std::size_t i = 0; i < dir.size();) {
    std::size_t j = i;
    int fwd = 0, bwd = 0;
    while (j < dir.size() && dir[j].lo == dir[i].lo && dir[j].hi == dir[i].hi) {
      (dir[j].forward ? fwd : bwd)++;
      ++j;
    }
    ++rep.edge_count;
    const std::array<Index, 2> e = {dir[i].lo, dir[i].hi};
    const int total = fwd + bwd;
    if (total == 1) {
      rep.open_edges.push_back(e);
    } else if (total == 2) {
      if (fwd != 1) rep.misoriented_edges.push_back(e);
    } else {
      rep.nonmanifold_edges.push_back(e);
    }
    i = j;
  }

  rep.closed = rep.open_edges.empty();
  rep.manifold = rep.nonmanifold_edges.empty();
  rep.oriented = rep.misoriented_edges.empty();

  // Connected components over vertices that appear in some well-formed face.
  std::vector<Index> parent(static_cast<std::size_t>(rep.vertex_count));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::vector<bool> referenced(static_cast<std::size_t>(rep.vertex_count), false);
  for (Index f = 0; f < rep.face_count; ++f) {
    const auto& fv = mesh.faces[static_cast<std::size_t>(f)];
    if (!detail::face_combinatorially_ok(fv, rep.vertex_count)) continue;
    for (int k = 0; k < 3; ++k) referenced[static_cast<std::size_t>(fv[static_cast<std::size_t>(k)])] = true;
    for (int k = 0; k < 2; ++k) {
      const Index ra = find(fv[static_cast<std::size_t>(k)]);
      const Index rb = find(fv[static_cast<std::size_t>(k + 1)]);
      if (ra != rb) parent[static_cast<std::size_t>(ra)] = rb;
    }
  }
  std::vector<Index> roots;
  for (Index v = 0; v < rep.vertex_count; ++v) {
    if (referenced[static_cast<std::size_t>(v)]) roots.push_back(find(v));
  }
  std::sort(roots.begin(), roots.end());
  rep.components = static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());

  const bool all_referenced =
      std::all_of(referenced.begin(), referenced.end(), [](bool b) { return b; });
  if (rep.ok() && rep.closed && rep.components == 1 && all_referenced) {
    const int chi = rep.vertex_count - rep.edge_count + rep.face_count;
    if (chi <= 2 && chi % 2 == 0) rep.genus = (2 - chi) / 2;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Oriented one-rings.

struct OneRing {
  Index center = -1;
  // ccw viewed from outside; (center, w_i, w_{i+1}) is a positively oriented
  // face for every i, cyclically.
  std::vector<Index> neighbors;

  Index valence() const { return static_cast<Index>(neighbors.size()); }
};

namespace detail {

// Walks successor pairs (w_i -> w_{i+1}) collected from the faces around v.
// keys/vals hold the incident faces' (second, third) corners relative to v.
inline std::vector<Index> close_ring_walk(Index v, const std::vector<Index>& keys,
                                          const std::vector<Index>& vals) {
  const std::size_t valence = keys.size();
  if (valence == 0) throw_input("one_ring: vertex " + std::to_string(v) + " has no incident face");
  Index start = *std::min_element(keys.begin(), keys.end());
  std::vector<Index> ring;
  ring.reserve(valence);
  Index cur = start;
  for (std::size_t step = 0; step < valence; ++step) {
    ring.push_back(cur);
    Index nxt = -1;
    for (std::size_t k = 0; k < valence; ++k) {
      if (keys[k] == cur) {
        if (nxt != -1)
          throw_input("one_ring: vertex " + std::to_string(v) + " has a non-manifold star");
        nxt = vals[k];
      }
    }
    if (nxt == -1)
      throw_input("one_ring: vertex " + std::to_string(v) + " has an open or broken star");
    cur = nxt;
  }
  if (cur != start)
    throw_input("one_ring: vertex " + std::to_string(v) + " star does not close into one cycle");
  return ring;
}

}  // namespace detail

inline OneRing one_ring(const TriMesh& mesh, Index v) {
  if (v < 0 || v >= mesh.vertex_count())
    throw_input("one_ring: vertex index " + std::to_string(v) + " out of range");
  std::vector<Index> keys, vals;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      if (f[static_cast<std::size_t>(k)] == v) {
        keys.push_back(f[static_cast<std::size_t>((k + 1) % 3)]);
        vals.push_back(f[static_cast<std::size_t>((k + 2) % 3)]);
      }
    }
  }
  return OneRing{v, detail::close_ring_walk(v, keys, vals)};
}

// All rings in O(V + F); same result as per-vertex one_ring.
inline std::vector<OneRing> all_one_rings(const TriMesh& mesh) {
  const Index nv = mesh.vertex_count();
  std::vector<Index> valence(static_cast<std::size_t>(nv), 0);
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) valence[static_cast<std::size_t>(f[static_cast<std::size_t>(k)])]++;
  std::vector<std::size_t> offset(static_cast<std::size_t>(nv) + 1, 0);
  for (Index v = 0; v < nv; ++v)
    offset[static_cast<std::size_t>(v) + 1] =
        offset[static_cast<std::size_t>(v)] + static_cast<std::size_t>(valence[static_cast<std::size_t>(v)]);
  std::vector<Index> keys(offset.back()), vals(offset.back());
  std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const Index v = f[static_cast<std::size_t>(k)];
      const std::size_t slot = cursor[static_cast<std::size_t>(v)]++;
      keys[slot] = f[static_cast<std::size_t>((k + 1) % 3)];
      vals[slot] = f[static_cast<std::size_t>((k + 2) % 3)];
    }
  }
  std::vector<OneRing> rings(static_cast<std::size_t>(nv));
  for (Index v = 0; v < nv; ++v) {
    const std::size_t b = offset[static_cast<std::size_t>(v)];
    const std::size_t e = offset[static_cast<std::size_t>(v) + 1];
    std::vector<Index> ks(keys.begin() + static_cast<std::ptrdiff_t>(b),
                          keys.begin() + static_cast<std::ptrdiff_t>(e));
    std::vector<Index> vs(vals.begin() + static_cast<std::ptrdiff_t>(b),
                          vals.begin() + static_cast<std::ptrdiff_t>(e));
    rings[static_cast<std::size_t>(v)] = OneRing{v, detail::close_ring_walk(v, ks, vs)};
  }
  return rings;
}

// ---------------------------------------------------------------------------
// Edge table. Edge ids are deterministic: sorted by (lo, hi) vertex pair.

struct Edge {
  Index a = -1, b = -1;        // a < b
  Index face_ab = -1;          // face traversing a -> b
  Index face_ba = -1;          // face traversing b -> a
  Index opposite_ab = -1;      // third vertex of face_ab
  Index opposite_ba = -1;      // third vertex of face_ba
};

struct EdgeTable {
  std::vector<Edge> edges;
  // face_edges[f][k] = id of the edge opposite corner k, i.e. between
  // corners k+1 and k+2.
  std::vector<std::array<Index, 3>> face_edges;
};

inline EdgeTable build_edge_table(const TriMesh& mesh) {
  struct Rec {
    Index lo, hi, face, corner, opposite;
    bool forward;
  };
  std::vector<Rec> recs;
  recs.reserve(static_cast<std::size_t>(mesh.faces.size()) * 3);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[static_cast<std::size_t>(f)];
    for (int k = 0; k < 3; ++k) {
      const Index u = fv[static_cast<std::size_t>((k + 1) % 3)];
      const Index v = fv[static_cast<std::size_t>((k + 2) % 3)];
      recs.push_back({std::min(u, v), std::max(u, v), f, static_cast<Index>(k),
                      fv[static_cast<std::size_t>(k)], u < v});
    }
  }
  std::sort(recs.begin(), recs.end(), [](const Rec& x, const Rec& y) {
    return x.lo != y.lo ? x.lo < y.lo : x.hi < y.hi;
  });

  EdgeTable table;
  table.face_edges.assign(mesh.faces.size(), {-1, -1, -1});
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    while (j < recs.size() && recs[j].lo == recs[i].lo && recs[j].hi == recs[i].hi) ++j;
    if (j - i != 2)
      throw_input("edge table: edge (" + std::to_string(recs[i].lo) + "," +
                  std::to_string(recs[i].hi) + ") is incident to " + std::to_string(j - i) +
                  " faces; expected a closed manifold");
    Edge e;
    e.a = recs[i].lo;
    e.b = recs[i].hi;
    for (std::size_t k = i; k < j; ++k) {
      if (recs[k].forward) {
        e.face_ab = recs[k].face;
        e.opposite_ab = recs[k].opposite;
      } else {
        e.face_ba = recs[k].face;
        e.opposite_ba = recs[k].opposite;
      }
    }
    if (e.face_ab < 0 || e.face_ba < 0)
      throw_input("edge table: edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                  ") traversed twice in the same direction; mesh is not consistently oriented");
    const Index id = static_cast<Index>(table.edges.size());
    for (std::size_t k = i; k < j; ++k)
      table.face_edges[static_cast<std::size_t>(recs[k].face)][static_cast<std::size_t>(recs[k].corner)] = id;
    table.edges.push_back(e);
    i = j;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Midpoint subdivision: V' = V + E, F' = 4F; new vertex for edge id e is V+e.

inline TriMesh midpoint_subdivide(const TriMesh& mesh) {
  const EdgeTable table = build_edge_table(mesh);
  TriMesh out;
  out.vertices = mesh.vertices;
  out.vertices.reserve(mesh.vertices.size() + table.edges.size());
  for (const Edge& e : table.edges)
    out.vertices.push_back((mesh.vertices[static_cast<std::size_t>(e.a)] +
                            mesh.vertices[static_cast<std::size_t>(e.b)]) * 0.5);

  const Index nv = mesh.vertex_count();
  out.faces.reserve(static_cast<std::size_t>(mesh.face_count()) * 4);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[static_cast<std::size_t>(f)];
    const auto& fe = table.face_edges[static_cast<std::size_t>(f)];
    const Index m12 = nv + fe[0];  // midpoint of (v1, v2)
    const Index m20 = nv + fe[1];
    const Index m01 = nv + fe[2];
    out.faces.push_back({fv[0], m01, m20});
    out.faces.push_back({fv[1], m12, m01});
    out.faces.push_back({fv[2], m20, m12});
    out.faces.push_back({m01, m12, m20});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sphere inversion: x -> center + radius^2 (x - center)/|x - center|^2.

inline TriMesh invert_sphere(const TriMesh& mesh, const Vec3& center, double radius) {
  TriMesh out = mesh;
  const double r2 = radius * radius;
  for (std::size_t v = 0; v < out.vertices.size(); ++v) {
    const Vec3 d = out.vertices[v] - center;
    const double n2 = norm2(d);
    if (n2 == 0.0)
      throw_input("invert_sphere: vertex " + std::to_string(v) + " coincides with the center");
    out.vertices[v] = center + d * (r2 / n2);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetry.

struct SymmetryElement {
  Mat3 g;                   // orthogonal
  std::vector<Index> perm;  // pi_g, size V
};

struct SymmetrySpec {
  std::vector<SymmetryElement> elements;
};

namespace detail {

inline std::array<Index, 3> sorted_triple(std::array<Index, 3> t) {
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace detail

// max over (g, v) of |g x_v - x_{pi_g(v)}|; throws if some pi_g is not a
// simplicial automorphism of the face set.
inline double symmetry_deviation(const TriMesh& mesh, const SymmetrySpec& sym) {
  const Index nv = mesh.vertex_count();
  std::vector<std::array<Index, 3>> face_set;
  face_set.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) face_set.push_back(detail::sorted_triple(f));
  std::sort(face_set.begin(), face_set.end());

  double dev = 0.0;
  for (std::size_t gi = 0; gi < sym.elements.size(); ++gi) {
    const auto& el = sym.elements[gi];
    if (static_cast<Index>(el.perm.size()) != nv)
      throw_input("symmetry: element " + std::to_string(gi) + " permutation has size " +
                  std::to_string(el.perm.size()) + ", expected " + std::to_string(nv));
    std::vector<bool> hit(static_cast<std::size_t>(nv), false);
    for (Index v = 0; v < nv; ++v) {
      const Index w = el.perm[static_cast<std::size_t>(v)];
      if (w < 0 || w >= nv || hit[static_cast<std::size_t>(w)])
        throw_input("symmetry: element " + std::to_string(gi) + " is not a permutation");
      hit[static_cast<std::size_t>(w)] = true;
    }
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
      const auto& f = mesh.faces[fi];
      const std::array<Index, 3> image = detail::sorted_triple(
          {el.perm[static_cast<std::size_t>(f[0])], el.perm[static_cast<std::size_t>(f[1])],
           el.perm[static_cast<std::size_t>(f[2])]});
      if (!std::binary_search(face_set.begin(), face_set.end(), image))
        throw_input("symmetry: element " + std::to_string(gi) +
                    " does not map face " + std::to_string(fi) + " to a face (not an automorphism)");
    }
    for (Index v = 0; v < nv; ++v) {
      const Vec3 gx = el.g * mesh.vertices[static_cast<std::size_t>(v)];
      const Vec3 target = mesh.vertices[static_cast<std::size_t>(el.perm[static_cast<std::size_t>(v)])];
      dev = std::max(dev, norm(gx - target));
    }
  }
  return dev;
}

}  // namespace willmin
