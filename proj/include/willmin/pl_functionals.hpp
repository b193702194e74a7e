#pragma once

// Piecewise-linear functionals on closed oriented triangle meshes: total area
// and enclosed volume with exact gradients, per-vertex local area schemes,
// integrated mean curvature (cotangent and Steiner forms), the discrete
// Willmore energies they induce, and the Dirichlet energy of the identity map
// with respect to a reference conformal structure.
//
// Sign conventions. The discrete mean-curvature vector at a vertex v is
// H(v) = -grad_v A / (2 a(v)); the scalar H(v) carries the sign of
// <H(v), n(v)> where n(v) is the unit direction with <n(v), grad_v V> > 0.
// For outward-oriented convex meshes this makes H < 0 and M = -sum H a > 0,
// matching the smooth convention M(S) = -int H dA > 0 for a sphere with
// outward normal.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "willmin/common.hpp"
#include "willmin/dual.hpp"
#include "willmin/generators.hpp"
#include "willmin/mesh.hpp"

namespace willmin {

using VertexScalarField = std::vector<double>;
using VertexVectorField = std::vector<Vec3>;

enum class LocalAreaScheme { Centroid, Voronoi, EffArea, NormalCur };
enum class WVariant { Centroid, Voronoi, EffArea, NormalCur, Bobenko };
enum class MVariant { Cotan, Steiner };

// Reference conformal structure for the Dirichlet energy. Equilateral treats
// every domain triangle as equilateral; TorusLattice maps the (m,n) torus
// grid to the lattice C / (Z m + Z n(omega-1)) with grid site (i,j) at
// i + j(omega - 1), so each grid quad splits into two congruent triangles
// with side classes {1, omega-1, omega}.
struct ConformalStructure {
  enum class Kind { Equilateral, TorusLattice };
  Kind kind = Kind::Equilateral;
  std::complex<double> omega{0.5, 0.8660254037844386};
  int m = 0, n = 0;

  static ConformalStructure equilateral() { return {}; }
  static ConformalStructure torus_lattice(std::complex<double> omega, int m, int n) {
    ConformalStructure s;
    s.kind = Kind::TorusLattice;
    s.omega = omega;
    s.m = m;
    s.n = n;
    return s;
  }
};

struct EnergyResult {
  double value = 0.0;
  VertexVectorField gradient;
};

struct MeanCurvatureField {
  VertexScalarField H;
  VertexVectorField normal;
  std::vector<Index> sign_zero;  // vertices where <grad A, grad V> = 0 but grad A != 0
};

namespace detail {

inline void require_positive_face_areas(const TriMesh& mesh, const char* op) {
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fc = mesh.faces[static_cast<std::size_t>(f)];
    const Vec3& p = mesh.vertices[static_cast<std::size_t>(fc[0])];
    const Vec3& q = mesh.vertices[static_cast<std::size_t>(fc[1])];
    const Vec3& r = mesh.vertices[static_cast<std::size_t>(fc[2])];
    if (norm2(cross(q - p, r - p)) == 0.0)
      throw_numerical(std::string(op) + ": face " + std::to_string(f) + " has zero area");
  }
}

// gradient of the star area with respect to the ring center x;
// w lists the ring neighbors in ccw order
template <typename T>
V3<T> ring_grad_area(const V3<T>& x, const std::vector<V3<T>>& w) {
  V3<T> g{};
  const std::size_t k = w.size();
  for (std::size_t i = 0; i < k; ++i) {
    const V3<T>& a = w[i];
    const V3<T>& b = w[(i + 1) % k];
    V3<T> fn = cross(a - x, b - x);
    g += cross(fn / norm(fn), b - a) * T(0.5);
  }
  return g;
}

// gradient of the enclosed volume with respect to the ring center
template <typename T>
V3<T> ring_grad_volume(const std::vector<V3<T>>& w) {
  V3<T> g{};
  const std::size_t k = w.size();
  for (std::size_t i = 0; i < k; ++i) g += cross(w[i], w[(i + 1) % k]) * T(1.0 / 6.0);
  return g;
}

template <typename T>
T ring_area_centroid(const V3<T>& x, const std::vector<V3<T>>& w) {
  T acc(0.0);
  const std::size_t k = w.size();
  for (std::size_t i = 0; i < k; ++i)
    acc += norm(cross(w[i] - x, w[(i + 1) % k] - x)) * T(0.5);
  return acc / T(3.0);
}

// Meyer mixed area: circumcentric cell clipped to the triangle. Non-obtuse
// triangles use the exact circumcentric corner area; a triangle obtuse at the
// center contributes half its area, obtuse elsewhere a quarter.
template <typename T>
T ring_area_voronoi(const V3<T>& x, const std::vector<V3<T>>& w) {
  T acc(0.0);
  const std::size_t k = w.size();
  for (std::size_t i = 0; i < k; ++i) {
    const V3<T>& a = w[i];
    const V3<T>& b = w[(i + 1) % k];
    V3<T> ea = a - x, eb = b - x;
    T cr = norm(cross(ea, eb));  // twice the face area
    T dx = dot(ea, eb);
    T da = dot(x - a, b - a);
    T db = dot(x - b, a - b);
    if (val(dx) < 0.0)
      acc += cr * T(0.25);
    else if (val(da) < 0.0 || val(db) < 0.0)
      acc += cr * T(0.125);
    else
      acc += (norm2(eb) * (da / cr) + norm2(ea) * (db / cr)) * T(0.125);
  }
  return acc;
}

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Circle intersection angle beta(e) for the edge quad. The cycle
// (r, a, s, b) lists the opposite vertex of the face traversing a->b, the
// endpoints, and the opposite vertex of the face traversing b->a.
template <typename T>
T edge_beta(const V3<T>& pa, const V3<T>& pb, const V3<T>& pr, const V3<T>& ps) {
  using std::atan2;
  V3<T> A = pa - pr, B = ps - pa, C = pb - ps, D = pr - pb;
  T den = norm(A) * norm(B) * norm(C) * norm(D);
  T num = dot(A, C) * dot(B, D) - dot(A, B) * dot(C, D) - dot(B, C) * dot(D, A);
  T arg = num / den;
  if (std::abs(val(arg)) <= 1.0 - 1e-12) return acos_clamped(arg);
  // Near-cocircular quads make arccos ill-conditioned. Invert about the edge
  // endpoint a: each circumcircle becomes a line, whose direction is the
  // circle tangent at a. The intersection angle is stable in atan2 form.
  V3<T> ur = (pr - pa) / norm2(pr - pa);
  V3<T> us = (ps - pa) / norm2(ps - pa);
  V3<T> ub = (pb - pa) / norm2(pb - pa);
  V3<T> t1 = ur - ub, t2 = us - ub;
  return atan2(norm(cross(t1, t2)), -dot(t1, t2));
}

inline std::vector<V3<Dual>> dual_ring(const TriMesh& mesh, const OneRing& ring) {
  std::vector<V3<Dual>> w(ring.neighbors.size());
  for (std::size_t i = 0; i < ring.neighbors.size(); ++i)
    w[i] = dual_point(mesh.vertices[static_cast<std::size_t>(ring.neighbors[i])],
                      static_cast<int>(i) + 1);
  return w;
}

inline void scatter_ring(const Dual& term, Index v, const OneRing& ring, VertexVectorField& g) {
  g[static_cast<std::size_t>(v)] += Vec3{term.deriv(0), term.deriv(1), term.deriv(2)};
  for (std::size_t i = 0; i < ring.neighbors.size(); ++i) {
    const int base = 3 * (static_cast<int>(i) + 1);
    g[static_cast<std::size_t>(ring.neighbors[i])] +=
        Vec3{term.deriv(base), term.deriv(base + 1), term.deriv(base + 2)};
  }
}

}  // namespace detail

inline double area(const TriMesh& mesh) {
  std::vector<double> parts(static_cast<std::size_t>(mesh.face_count()));
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fc = mesh.faces[static_cast<std::size_t>(f)];
    const Vec3& p = mesh.vertices[static_cast<std::size_t>(fc[0])];
    const Vec3& q = mesh.vertices[static_cast<std::size_t>(fc[1])];
    const Vec3& r = mesh.vertices[static_cast<std::size_t>(fc[2])];
    parts[static_cast<std::size_t>(f)] = 0.5 * norm(cross(q - p, r - p));
  }
  return pairwise_sum(parts);
}

inline double volume(const TriMesh& mesh) {
  std::vector<double> parts(static_cast<std::size_t>(mesh.face_count()));
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fc = mesh.faces[static_cast<std::size_t>(f)];
    const Vec3& p = mesh.vertices[static_cast<std::size_t>(fc[0])];
    const Vec3& q = mesh.vertices[static_cast<std::size_t>(fc[1])];
    const Vec3& r = mesh.vertices[static_cast<std::size_t>(fc[2])];
    parts[static_cast<std::size_t>(f)] = dot(p, cross(q, r)) / 6.0;
  }
  return pairwise_sum(parts);
}

inline VertexVectorField grad_area(const TriMesh& mesh) {
  detail::require_positive_face_areas(mesh, "grad_area");
  VertexVectorField g(static_cast<std::size_t>(mesh.vertex_count()));
  for (const auto& fc : mesh.faces) {
    const Vec3& p = mesh.vertices[static_cast<std::size_t>(fc[0])];
    const Vec3& q = mesh.vertices[static_cast<std::size_t>(fc[1])];
    const Vec3& r = mesh.vertices[static_cast<std::size_t>(fc[2])];
    const Vec3 nh = normalized(cross(q - p, r - p));
    g[static_cast<std::size_t>(fc[0])] += 0.5 * cross(nh, r - q);
    g[static_cast<std::size_t>(fc[1])] += 0.5 * cross(nh, p - r);
    g[static_cast<std::size_t>(fc[2])] += 0.5 * cross(nh, q - p);
  }
  return g;
}

inline VertexVectorField grad_volume(const TriMesh& mesh) {
  VertexVectorField g(static_cast<std::size_t>(mesh.vertex_count()));
  for (const auto& fc : mesh.faces) {
    const Vec3& p = mesh.vertices[static_cast<std::size_t>(fc[0])];
    const Vec3& q = mesh.vertices[static_cast<std::size_t>(fc[1])];
    const Vec3& r = mesh.vertices[static_cast<std::size_t>(fc[2])];
    g[static_cast<std::size_t>(fc[0])] += cross(q, r) / 6.0;
    g[static_cast<std::size_t>(fc[1])] += cross(r, p) / 6.0;
    g[static_cast<std::size_t>(fc[2])] += cross(p, q) / 6.0;
  }
  return g;
}

inline VertexScalarField local_area(const TriMesh& mesh, LocalAreaScheme scheme) {
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  VertexScalarField a(nv, 0.0);
  if (scheme == LocalAreaScheme::Centroid) {
    for (const auto& fc : mesh.faces) {
      const Vec3& p = mesh.vertices[static_cast<std::size_t>(fc[0])];
      const Vec3& q = mesh.vertices[static_cast<std::size_t>(fc[1])];
      const Vec3& r = mesh.vertices[static_cast<std::size_t>(fc[2])];
      const double third = norm(cross(q - p, r - p)) / 6.0;
      for (int k = 0; k < 3; ++k) a[static_cast<std::size_t>(fc[k])] += third;
    }
    return a;
  }
  if (scheme == LocalAreaScheme::Voronoi) {
    detail::require_positive_face_areas(mesh, "local_area");
    const auto rings = all_one_rings(mesh);
    for (Index v = 0; v < mesh.vertex_count(); ++v) {
      std::vector<Vec3> w(rings[static_cast<std::size_t>(v)].neighbors.size());
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = mesh.vertices[static_cast<std::size_t>(
            rings[static_cast<std::size_t>(v)].neighbors[i])];
      a[static_cast<std::size_t>(v)] =
          detail::ring_area_voronoi(mesh.vertices[static_cast<std::size_t>(v)], w);
    }
    return a;
  }
  const VertexVectorField gv = grad_volume(mesh);
  if (scheme == LocalAreaScheme::EffArea) {
    for (std::size_t v = 0; v < nv; ++v) a[v] = norm(gv[v]);
    return a;
  }
  // NormalCur: projection of the volume gradient onto the curvature direction
  const VertexVectorField ga = grad_area(mesh);
  for (std::size_t v = 0; v < nv; ++v) {
    const double gnorm = norm(ga[v]);
    if (gnorm == 0.0)
      throw_numerical("local_area: NormalCur scheme undefined at vertex " + std::to_string(v) +
                      " (zero area gradient)");
    a[v] = std::abs(dot(gv[v], ga[v])) / gnorm;
  }
  return a;
}

inline MeanCurvatureField mean_curvature(const TriMesh& mesh, LocalAreaScheme scheme) {
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  const VertexVectorField ga = grad_area(mesh);
  const VertexVectorField gv = grad_volume(mesh);
  const VertexScalarField a = local_area(mesh, scheme);
  MeanCurvatureField out;
  out.H.assign(nv, 0.0);
  out.normal.assign(nv, Vec3{});
  for (std::size_t v = 0; v < nv; ++v) {
    if (a[v] == 0.0)
      throw_numerical("mean_curvature: zero local area at vertex " + std::to_string(v));
    const double gnorm = norm(ga[v]);
    if (gnorm == 0.0) {
      // area-critical vertex: H = 0, normal from the volume gradient if usable
      const double vnorm = norm(gv[v]);
      if (vnorm > 0.0) out.normal[v] = gv[v] / vnorm;
      continue;
    }
    const int s = detail::sign_of(dot(ga[v], gv[v]));
    if (s == 0) {
      out.sign_zero.push_back(static_cast<Index>(v));
      continue;  // H = 0, normal left zero: direction is ambiguous here
    }
    out.H[v] = -static_cast<double>(s) * gnorm / (2.0 * a[v]);
    out.normal[v] = (static_cast<double>(s) / gnorm) * ga[v];
  }
  return out;
}

inline EnergyResult w_pl(const TriMesh& mesh, WVariant variant) {
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  EnergyResult res;
  res.gradient.assign(nv, Vec3{});

  if (variant == WVariant::Bobenko) {
    const EdgeTable et = build_edge_table(mesh);
    const long chi = static_cast<long>(mesh.vertex_count()) -
                     static_cast<long>(et.edges.size()) + static_cast<long>(mesh.face_count());
    if (chi % 2 != 0) throw_input("w_pl: Euler characteristic is odd, genus undefined");
    const long genus = (2 - chi) / 2;
    std::vector<double> parts(et.edges.size(), 0.0);
    for (std::size_t e = 0; e < et.edges.size(); ++e) {
      const Edge& ed = et.edges[e];
      const Vec3& xa = mesh.vertices[static_cast<std::size_t>(ed.a)];
      const Vec3& xb = mesh.vertices[static_cast<std::size_t>(ed.b)];
      if (norm2(xb - xa) == 0.0)
        throw_input("w_pl: zero-length edge between vertices " + std::to_string(ed.a) + " and " +
                    std::to_string(ed.b));
      V3<Dual> pa = dual_point(xa, 0);
      V3<Dual> pb = dual_point(xb, 1);
      V3<Dual> pr = dual_point(mesh.vertices[static_cast<std::size_t>(ed.opposite_ab)], 2);
      V3<Dual> ps = dual_point(mesh.vertices[static_cast<std::size_t>(ed.opposite_ba)], 3);
      if (val(norm2(pa - pr)) == 0.0 || val(norm2(ps - pa)) == 0.0 ||
          val(norm2(pb - ps)) == 0.0 || val(norm2(pr - pb)) == 0.0)
        throw_input("w_pl: degenerate edge quad at edge " + std::to_string(e));
      const Dual beta = detail::edge_beta(pa, pb, pr, ps);
      parts[e] = beta.v;
      const std::array<Index, 4> ids{ed.a, ed.b, ed.opposite_ab, ed.opposite_ba};
      for (int k = 0; k < 4; ++k)
        res.gradient[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] +=
            Vec3{beta.deriv(3 * k), beta.deriv(3 * k + 1), beta.deriv(3 * k + 2)};
    }
    res.value = pairwise_sum(parts) - kPi * static_cast<double>(mesh.vertex_count()) +
                4.0 * kPi * (1.0 - static_cast<double>(genus));
    return res;
  }

  detail::require_positive_face_areas(mesh, "w_pl");
  const LocalAreaScheme scheme = variant == WVariant::Centroid  ? LocalAreaScheme::Centroid
                                 : variant == WVariant::Voronoi ? LocalAreaScheme::Voronoi
                                 : variant == WVariant::EffArea ? LocalAreaScheme::EffArea
                                                                : LocalAreaScheme::NormalCur;
  const auto rings = all_one_rings(mesh);
  std::vector<double> parts(nv, 0.0);
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    const OneRing& ring = rings[static_cast<std::size_t>(v)];
    V3<Dual> x = dual_point(mesh.vertices[static_cast<std::size_t>(v)], 0);
    const std::vector<V3<Dual>> w = detail::dual_ring(mesh, ring);
    const V3<Dual> gA = detail::ring_grad_area(x, w);
    const Dual g2 = norm2(gA);
    if (val(g2) == 0.0) continue;  // flat vertex: zero curvature energy
    Dual a(0.0);
    switch (scheme) {
      case LocalAreaScheme::Centroid:
        a = detail::ring_area_centroid(x, w);
        break;
      case LocalAreaScheme::Voronoi:
        a = detail::ring_area_voronoi(x, w);
        break;
      case LocalAreaScheme::EffArea:
        a = norm(detail::ring_grad_volume(w));
        break;
      case LocalAreaScheme::NormalCur: {
        const Dual dd = dot(detail::ring_grad_volume(w), gA);
        const int s = detail::sign_of(val(dd));
        a = (s >= 0 ? dd : -dd) / sqrt(g2);
        break;
      }
    }
    if (val(a) == 0.0) {
      // curved vertex with a vanishing local area: the energy diverges
      res.value = kInf;
      res.gradient.assign(nv, Vec3{});
      return res;
    }
    const Dual term = g2 / (a * Dual(4.0));
    parts[static_cast<std::size_t>(v)] = term.v;
    detail::scatter_ring(term, v, ring, res.gradient);
  }
  res.value = pairwise_sum(parts);
  return res;
}

inline EnergyResult m_pl(const TriMesh& mesh, MVariant variant) {
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  EnergyResult res;
  res.gradient.assign(nv, Vec3{});

  if (variant == MVariant::Cotan) {
    detail::require_positive_face_areas(mesh, "m_pl");
    const auto rings = all_one_rings(mesh);
    std::vector<double> parts(nv, 0.0);
    for (Index v = 0; v < mesh.vertex_count(); ++v) {
      const OneRing& ring = rings[static_cast<std::size_t>(v)];
      V3<Dual> x = dual_point(mesh.vertices[static_cast<std::size_t>(v)], 0);
      const std::vector<V3<Dual>> w = detail::dual_ring(mesh, ring);
      const V3<Dual> gA = detail::ring_grad_area(x, w);
      if (val(norm2(gA)) == 0.0) continue;
      // the sign is locally constant, so it is frozen for differentiation
      const int s = detail::sign_of(val(dot(detail::ring_grad_volume(w), gA)));
      if (s == 0) continue;
      const Dual term = norm(gA) * Dual(0.5 * static_cast<double>(s));
      parts[static_cast<std::size_t>(v)] = term.v;
      detail::scatter_ring(term, v, ring, res.gradient);
    }
    res.value = pairwise_sum(parts);
    return res;
  }

  // Steiner: sum of edge length times signed dihedral turning angle
  const EdgeTable et = build_edge_table(mesh);
  for (const Edge& ed : et.edges)
    if (norm2(mesh.vertices[static_cast<std::size_t>(ed.b)] -
              mesh.vertices[static_cast<std::size_t>(ed.a)]) == 0.0)
      throw_input("m_pl: zero-length edge between vertices " + std::to_string(ed.a) + " and " +
                  std::to_string(ed.b));
  std::vector<double> parts(et.edges.size(), 0.0);
  for (std::size_t e = 0; e < et.edges.size(); ++e) {
    const Edge& ed = et.edges[e];
    const Vec3& xa = mesh.vertices[static_cast<std::size_t>(ed.a)];
    const Vec3& xb = mesh.vertices[static_cast<std::size_t>(ed.b)];
    V3<Dual> pa = dual_point(xa, 0);
    V3<Dual> pb = dual_point(xb, 1);
    V3<Dual> pr = dual_point(mesh.vertices[static_cast<std::size_t>(ed.opposite_ab)], 2);
    V3<Dual> ps = dual_point(mesh.vertices[static_cast<std::size_t>(ed.opposite_ba)], 3);
    V3<Dual> n1 = cross(pb - pa, pr - pa);  // face traversing a->b
    V3<Dual> n2 = cross(pa - pb, ps - pb);  // face traversing b->a
    const Dual l1 = norm(n1), l2 = norm(n2);
    if (val(l1) == 0.0)
      throw_numerical("m_pl: face " + std::to_string(ed.face_ab) + " has zero area");
    if (val(l2) == 0.0)
      throw_numerical("m_pl: face " + std::to_string(ed.face_ba) + " has zero area");
    n1 = n1 / l1;
    n2 = n2 / l2;
    const Dual len = norm(pb - pa);
    const V3<Dual> ehat = (pb - pa) / len;
    const Dual theta = atan2(dot(cross(n1, n2), ehat), dot(n1, n2));
    const Dual term = len * theta;
    parts[e] = term.v;
    const std::array<Index, 4> ids{ed.a, ed.b, ed.opposite_ab, ed.opposite_ba};
    for (int k = 0; k < 4; ++k)
      res.gradient[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] +=
          Vec3{term.deriv(3 * k), term.deriv(3 * k + 1), term.deriv(3 * k + 2)};
  }
  res.value = pairwise_sum(parts);
  return res;
}

namespace detail {

// cotangent of the interior angles of the lattice triangle (0, 1, omega),
// opposite the side classes: [0] the i-edge (side 0->1, angle at omega),
// [1] the j-edge (side 1->omega, angle at 0), [2] the diagonal (side
// omega->0, angle at 1)
inline std::array<double, 3> lattice_cotangents(std::complex<double> omega) {
  const double re = omega.real(), im = omega.imag();
  if (!(im > 0.0)) throw_input("dirichlet_energy: Im(omega) must be positive");
  return {(std::norm(omega) - re) / im, re / im, (1.0 - re) / im};
}

// per-edge Dirichlet weights k_e for the torus grid; index by edge class
inline double torus_edge_weight(const ConformalStructure& cs, Index a, Index b) {
  const int n = cs.n, m = cs.m;
  const int ia = static_cast<int>(a) / n, ja = static_cast<int>(a) % n;
  const int ib = static_cast<int>(b) / n, jb = static_cast<int>(b) % n;
  const auto cot = lattice_cotangents(cs.omega);
  const bool i_step = (ib == (ia + 1) % m && jb == ja) || (ia == (ib + 1) % m && ja == jb);
  if (i_step) return 0.5 * cot[0];
  const bool j_step = (ia == ib && (jb == (ja + 1) % n || ja == (jb + 1) % n));
  if (j_step) return 0.5 * cot[1];
  const bool diag = (ib == (ia + 1) % m && jb == (ja + 1) % n) ||
                    (ia == (ib + 1) % m && ja == (jb + 1) % n);
  if (diag) return 0.5 * cot[2];
  throw_input("dirichlet_energy: edge does not belong to the torus grid");
}

inline void require_torus_grid(const TriMesh& mesh, const ConformalStructure& cs) {
  if (cs.m < 3 || cs.n < 3) throw_input("dirichlet_energy: TorusLattice requires m, n >= 3");
  if (mesh.vertex_count() != static_cast<Index>(cs.m) * static_cast<Index>(cs.n) ||
      mesh.faces != torus_grid_faces(cs.m, cs.n))
    throw_input("dirichlet_energy: mesh does not have the (m, n) torus grid layout");
}

}  // namespace detail

inline EnergyResult dirichlet_energy(const TriMesh& mesh, const ConformalStructure& cs) {
  if (cs.kind == ConformalStructure::Kind::TorusLattice) detail::require_torus_grid(mesh, cs);
  const EdgeTable et = build_edge_table(mesh);
  EnergyResult res;
  res.gradient.assign(static_cast<std::size_t>(mesh.vertex_count()), Vec3{});
  std::vector<double> parts(et.edges.size(), 0.0);
  const double k_equilateral = 0.5 / std::sqrt(3.0);
  for (std::size_t e = 0; e < et.edges.size(); ++e) {
    const Edge& ed = et.edges[e];
    const double k = cs.kind == ConformalStructure::Kind::Equilateral
                         ? k_equilateral
                         : detail::torus_edge_weight(cs, ed.a, ed.b);
    const Vec3& xa = mesh.vertices[static_cast<std::size_t>(ed.a)];
    const Vec3& xb = mesh.vertices[static_cast<std::size_t>(ed.b)];
    parts[e] = k * norm2(xa - xb);
    res.gradient[static_cast<std::size_t>(ed.a)] += (2.0 * k) * (xa - xb);
    res.gradient[static_cast<std::size_t>(ed.b)] += (2.0 * k) * (xb - xa);
  }
  res.value = pairwise_sum(parts);
  return res;
}

// partial derivatives of the Dirichlet energy with respect to (Re omega,
// Im omega), by central differences; the energy is smooth in omega
inline std::array<double, 2> dirichlet_domain_gradient(const TriMesh& mesh,
                                                       const ConformalStructure& cs) {
  if (cs.kind != ConformalStructure::Kind::TorusLattice)
    throw_input("dirichlet_domain_gradient: requires a TorusLattice structure");
  const double h = 1e-6 * std::max(1.0, std::abs(cs.omega));
  std::array<double, 2> g{};
  for (int k = 0; k < 2; ++k) {
    ConformalStructure up = cs, dn = cs;
    const std::complex<double> step = k == 0 ? std::complex<double>(h, 0.0)
                                             : std::complex<double>(0.0, h);
    up.omega += step;
    dn.omega -= step;
    g[static_cast<std::size_t>(k)] =
        (dirichlet_energy(mesh, up).value - dirichlet_energy(mesh, dn).value) / (2.0 * h);
  }
  return g;
}

}  // namespace willmin
