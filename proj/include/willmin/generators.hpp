#pragma once

// Mesh families used throughout: spherical/planar torus grids, platonic-solid
// spheres (optionally projected/flattened), and tori of revolution.
//
// Torus grids share one connectivity builder: vertices V_{i,j} (i layer,
// j around, both cyclic), faces (i,j)-(i+1,j)-(i+1,j+1) and
// (i,j)-(i+1,j+1)-(i,j+1), so every vertex has the 6-neighbor stencil
// (i+-1, j), (i, j+-1), (i+1, j+1), (i-1, j-1).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "willmin/common.hpp"
#include "willmin/mesh.hpp"

namespace willmin {

inline std::vector<std::array<Index, 3>> torus_grid_faces(int m, int n) {
  std::vector<std::array<Index, 3>> faces;
  faces.reserve(static_cast<std::size_t>(2 * m * n));
  auto vid = [n](int i, int j) { return static_cast<Index>(i * n + j); };
  for (int i = 0; i < m; ++i) {
    const int i1 = (i + 1) % m;
    for (int j = 0; j < n; ++j) {
      const int j1 = (j + 1) % n;
      faces.push_back({vid(i, j), vid(i1, j), vid(i1, j1)});
      faces.push_back({vid(i, j), vid(i1, j1), vid(i, j1)});
    }
  }
  return faces;
}

// V_{i,j} = (sin t cos(j dv), sin t sin(j dv), cos t), t = tau(i du),
// tau(u) = (pi - 2 eps) u / (2 pi (1 - 1/m)) + eps. Layer 0 sits at polar
// angle exactly eps, layer m-1 at pi - eps; all vertices on the unit sphere.
inline TriMesh spherical_torus(int m, int n, double eps) {
  if (m < 3 || n < 3) throw_input("spherical_torus: grid sizes must be >= 3");
  if (!(eps > 0.0 && eps < kPi / 2))
    throw_input("spherical_torus: eps must lie in (0, pi/2)");
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(m * n));
  const double du = 2 * kPi / m;
  const double dv = 2 * kPi / n;
  const double scale = (kPi - 2 * eps) / (2 * kPi * (1.0 - 1.0 / m));
  for (int i = 0; i < m; ++i) {
    const double tau = scale * (i * du) + eps;
    const double st = std::sin(tau), ct = std::cos(tau);
    for (int j = 0; j < n; ++j)
      mesh.vertices.push_back({st * std::cos(j * dv), st * std::sin(j * dv), ct});
  }
  mesh.faces = torus_grid_faces(m, n);
  return mesh;
}

// V_{i,j} = r_i (cos(2 pi j/n), sin(2 pi j/n), 0), r strictly decreasing.
inline TriMesh planar_torus(int m, int n, const std::vector<double>& r) {
  if (m < 3 || n < 3) throw_input("planar_torus: grid sizes must be >= 3");
  if (static_cast<int>(r.size()) != m)
    throw_input("planar_torus: need exactly m = " + std::to_string(m) + " radii, got " +
                std::to_string(r.size()));
  for (int i = 0; i < m; ++i) {
    if (!(r[static_cast<std::size_t>(i)] > 0.0))
      throw_input("planar_torus: radii must be positive");
    if (i > 0 && !(r[static_cast<std::size_t>(i)] < r[static_cast<std::size_t>(i - 1)]))
      throw_input("planar_torus: radii must be strictly decreasing");
  }
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(m * n));
  const double dv = 2 * kPi / n;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      mesh.vertices.push_back(
          {r[static_cast<std::size_t>(i)] * std::cos(j * dv),
           r[static_cast<std::size_t>(i)] * std::sin(j * dv), 0.0});
  mesh.faces = torus_grid_faces(m, n);
  return mesh;
}

enum class SphereKind { Octahedron, Icosahedron, Tetrahedron };

namespace detail {

inline TriMesh platonic(SphereKind kind) {
  TriMesh mesh;
  switch (kind) {
    case SphereKind::Octahedron:
      // +-e_i, unit circumradius, outward faces
      mesh.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
      mesh.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                    {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
      break;
    case SphereKind::Tetrahedron: {
      const double s = 1.0 / std::sqrt(3.0);
      mesh.vertices = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
      mesh.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
      break;
    }
    case SphereKind::Icosahedron: {
      const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
      const double s = 1.0 / std::sqrt(1.0 + phi * phi);
      const double a = s, b = phi * s;
      mesh.vertices = {{-a, b, 0}, {a, b, 0},   {-a, -b, 0}, {a, -b, 0},
                       {0, -a, b}, {0, a, b},   {0, -a, -b}, {0, a, -b},
                       {b, 0, -a}, {b, 0, a},   {-b, 0, -a}, {-b, 0, a}};
      mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
      break;
    }
  }
  return mesh;
}

}  // namespace detail

// Platonic solid (unit circumradius), `levels` midpoint subdivisions; with
// project, vertices are pushed back to the unit sphere after each split;
// flatten scales z at the end (D_4h-style initial meshes).
inline TriMesh sphere_mesh(SphereKind kind, int levels, bool project,
                           std::optional<double> flatten = std::nullopt) {
  if (levels < 0) throw_input("sphere_mesh: levels must be >= 0");
  TriMesh mesh = detail::platonic(kind);
  for (int l = 0; l < levels; ++l) {
    mesh = midpoint_subdivide(mesh);
    if (project)
      for (Vec3& p : mesh.vertices) p = normalized(p);
  }
  if (flatten)
    for (Vec3& p : mesh.vertices) p.z *= *flatten;
  return mesh;
}

// Standard torus of revolution, outward oriented; same grid builder, so
// 6-regular and genus 1.
inline TriMesh revolution_torus(int m, int n, double R, double r) {
  if (m < 3 || n < 3) throw_input("revolution_torus: grid sizes must be >= 3");
  if (!(R > r && r > 0.0)) throw_input("revolution_torus: need R > r > 0");
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(m * n));
  // tube angle runs clockwise so the grid faces orient outward
  for (int i = 0; i < m; ++i) {
    const double alpha = -2 * kPi * i / m;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    for (int j = 0; j < n; ++j) {
      const double beta = 2 * kPi * j / n;
      mesh.vertices.push_back(
          {(R + r * ca) * std::cos(beta), (R + r * ca) * std::sin(beta), r * sa});
    }
  }
  mesh.faces = torus_grid_faces(m, n);
  return mesh;
}

}  // namespace willmin
