#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "willmin/generators.hpp"
#include "willmin/loop.hpp"
#include "willmin/pl_functionals.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using willmin::ControlMatrix;
using willmin::Index;
using willmin::TriMesh;
using willmin::Vec3;

namespace {

// Uniform point in the open unit triangle, at least `margin` from the corners.
std::pair<double, double> random_param(std::mt19937_64& rng, double margin = 1e-6) {
  std::uniform_real_distribution<double> uni(margin, 1.0 - margin);
  for (;;) {
    double v = uni(rng), w = uni(rng);
    if (v + w > 1.0) {
      v = 1.0 - v;
      w = 1.0 - w;
    }
    if (v + w > margin && v + w < 1.0 - margin) return {v, w};
  }
}

ControlMatrix random_controls(int rows, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ControlMatrix c(rows, 3);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = uni(rng);
  return c;
}

// Flips one interior edge of a valence-6 mesh, making two valence-5 and two
// valence-7 vertices. The flipped quad keeps the outward orientation.
TriMesh flip_one_edge(TriMesh mesh) {
  const willmin::EdgeTable et = willmin::build_edge_table(mesh);
  const willmin::Edge& e = et.edges.front();
  const Index u = e.a, v = e.b, x = e.opposite_ab, y = e.opposite_ba;
  mesh.faces[static_cast<std::size_t>(e.face_ab)] = {u, y, x};
  mesh.faces[static_cast<std::size_t>(e.face_ba)] = {v, x, y};
  return mesh;
}

double max_component_diff(const Vec3& a, const Vec3& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

// Canonical coarse-net slot -> regular basis slot, for valence 6. Derived
// from the grid sites: e=(0,0), ring (1,0),(0,1),(-1,1),(-1,0),(0,-1),(1,-1),
// outer (2,0),(1,1),(0,2),(2,-1),(-1,2).
constexpr std::array<int, 12> kCanonToRegular = {3, 6, 7, 4, 1, 0, 2, 9, 10, 11, 5, 8};

}  // namespace

TEST_CASE("loop vertex weights at representative valences") {
  CHECK_THAT(willmin::loop_beta(6), WithinAbs(1.0 / 16.0, 1e-15));
  CHECK_THAT(willmin::loop_beta(3), WithinAbs(3.0 / 16.0, 1e-15));
}

TEST_CASE("loop subdivision counts, affine invariance, genus") {
  const TriMesh m = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true);
  const willmin::EdgeTable et = willmin::build_edge_table(m);
  const TriMesh s = willmin::loop_subdivide(m);
  CHECK(s.vertex_count() == m.vertex_count() + static_cast<Index>(et.edges.size()));
  CHECK(s.face_count() == 4 * m.face_count());
  CHECK(willmin::validate(s).genus == 0);

  const TriMesh t = willmin::revolution_torus(5, 7, 2.0, 0.6);
  CHECK(willmin::validate(willmin::loop_subdivide(t)).genus == 1);

  // x -> Lx + t commutes with subdivision (all rules are affine combinations).
  const willmin::Mat3 L{{Vec3{1.2, 0.3, -0.1}, Vec3{0.0, 0.8, 0.4}, Vec3{-0.5, 0.2, 1.1}}};
  const Vec3 shift{0.3, -1.0, 2.0};
  TriMesh tm = m;
  for (auto& p : tm.vertices) p = L * p + shift;
  const TriMesh s1 = willmin::loop_subdivide(tm);
  TriMesh s2 = s;
  for (auto& p : s2.vertices) p = L * p + shift;
  double err = 0.0;
  for (Index i = 0; i < s1.vertex_count(); ++i)
    err = std::max(err, max_component_diff(s1.vertices[static_cast<std::size_t>(i)],
                                           s2.vertices[static_cast<std::size_t>(i)]));
  CHECK(err < 1e-13);
}

TEST_CASE("regular basis partitions unity with vanishing derivative sums") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [v, w] = random_param(rng);
    const willmin::LoopBasis bas = willmin::regular_basis(v, w, 2);
    double s = 0, sv = 0, sw = 0, svv = 0, svw = 0, sww = 0, mn = 1.0;
    for (int i = 0; i < 12; ++i) {
      s += bas.b[static_cast<std::size_t>(i)];
      sv += bas.bv[static_cast<std::size_t>(i)];
      sw += bas.bw[static_cast<std::size_t>(i)];
      svv += bas.bvv[static_cast<std::size_t>(i)];
      svw += bas.bvw[static_cast<std::size_t>(i)];
      sww += bas.bww[static_cast<std::size_t>(i)];
      mn = std::min(mn, bas.b[static_cast<std::size_t>(i)]);
    }
    REQUIRE_THAT(s, WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(sv, WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(sw, WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(svv, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(svw, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(sww, WithinAbs(0.0, 1e-12));
    REQUIRE(mn >= 0.0);  // convex hull property
  }
  CHECK_THROWS_AS(willmin::regular_basis(0.7, 0.7, 0), willmin::Error);
  CHECK_THROWS_AS(willmin::regular_basis(-0.1, 0.2, 0), willmin::Error);
}

TEST_CASE("regular basis reproduces linear functions over its grid sites") {
  std::mt19937_64 rng(102);
  ControlMatrix c(12, 3);
  for (int i = 0; i < 12; ++i) {
    const double sv = willmin::kBasisSites[static_cast<std::size_t>(i)][0];
    const double sw = willmin::kBasisSites[static_cast<std::size_t>(i)][1];
    c(i, 0) = sv;
    c(i, 1) = sw;
    c(i, 2) = 2.0 * sv - 3.0 * sw + 5.0;
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto [v, w] = random_param(rng);
    const willmin::PatchEval ev = willmin::eval_regular(c, v, w, 2);
    REQUIRE_THAT(ev.p[0], WithinAbs(v, 1e-13));
    REQUIRE_THAT(ev.p[1], WithinAbs(w, 1e-13));
    REQUIRE_THAT(ev.p[2], WithinAbs(2.0 * v - 3.0 * w + 5.0, 1e-12));
    REQUIRE_THAT(ev.pv[0], WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(ev.pv[1], WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(ev.pw[2], WithinAbs(-3.0, 1e-12));
    REQUIRE_THAT(ev.pvv[2], WithinAbs(0.0, 1e-11));
    REQUIRE_THAT(ev.pvw[2], WithinAbs(0.0, 1e-11));
    REQUIRE_THAT(ev.pww[2], WithinAbs(0.0, 1e-11));
  }
}

TEST_CASE("eigenstructure satisfies its matrix invariants") {
  for (int N : {3, 4, 5, 7, 8, 12}) {
    const willmin::EigenStructure es = willmin::eigenstructure(N);
    const int K = N + 6;
    const double resid = (es.A * es.V - es.V * es.Lambda).cwiseAbs().maxCoeff();
    const double inv = (es.V * es.Vinv - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff();
    INFO("valence " << N);
    CHECK(resid <= 1e-10);
    CHECK(inv <= 1e-10);

    // Rows of the (extended) subdivision matrix are affine combinations.
    CHECK((es.A.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((es.Abar.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);

    // Eigenvalue 1 is simple and leads; the rest of Lambda is diagonal except
    // for the single N=3 Jordan block.
    CHECK(es.eigenvalues(0) == 1.0);
    CHECK(es.eigenvalues(1) < 1.0 - 1e-6);
    int offdiag = 0;
    for (int r = 0; r < K; ++r)
      for (int cidx = 0; cidx < K; ++cidx)
        if (r != cidx && es.Lambda(r, cidx) != 0.0) ++offdiag;
    if (N == 3) {
      CHECK(offdiag == 1);
      REQUIRE(es.jordan_p >= 0);
      CHECK(es.Lambda(es.jordan_p, es.jordan_q) == 1.0);
      CHECK_THAT(es.eigenvalues(es.jordan_p), WithinAbs(1.0 / 16.0, 1e-12));
    } else {
      CHECK(offdiag == 0);
      CHECK(es.jordan_p == -1);
    }
  }
  CHECK_THROWS_AS(willmin::eigenstructure(2), willmin::Error);
}

TEST_CASE("irregular evaluation at valence 6 matches the regular polynomial") {
  std::mt19937_64 rng(103);
  const ControlMatrix c_reg = random_controls(12, 202);
  ControlMatrix c_can(12, 3);
  for (int i = 0; i < 12; ++i)
    c_can.row(i) = c_reg.row(kCanonToRegular[static_cast<std::size_t>(i)]);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [v, w] = random_param(rng);
    const willmin::PatchEval a = willmin::eval_regular(c_reg, v, w, 2);
    const willmin::PatchEval b = willmin::eval_irregular(c_can, v, w, 2);
    REQUIRE(max_component_diff(a.p, b.p) < 1e-10);
    REQUIRE(max_component_diff(a.pv, b.pv) < 1e-9);
    REQUIRE(max_component_diff(a.pw, b.pw) < 1e-9);
    REQUIRE(max_component_diff(a.pvv, b.pvv) < 1e-8);
    REQUIRE(max_component_diff(a.pvw, b.pvw) < 1e-8);
    REQUIRE(max_component_diff(a.pww, b.pww) < 1e-8);
  }
}

TEST_CASE("irregular derivatives agree with finite differences") {
  std::mt19937_64 rng(104);
  for (int N : {3, 4, 5, 7}) {
    const ControlMatrix c = random_controls(N + 6, 300 + static_cast<unsigned>(N));
    for (int trial = 0; trial < 20; ++trial) {
      const auto [v, w] = random_param(rng, 1e-3);
      const double h = 1e-6;
      const willmin::PatchEval ev = willmin::eval_irregular(c, v, w, 2);
      const auto at = [&](double vv, double ww) { return willmin::eval_irregular(c, vv, ww, 0).p; };
      const Vec3 fv = (at(v + h, w) - at(v - h, w)) / (2.0 * h);
      const Vec3 fw = (at(v, w + h) - at(v, w - h)) / (2.0 * h);
      REQUIRE(max_component_diff(ev.pv, fv) < 1e-5);
      REQUIRE(max_component_diff(ev.pw, fw) < 1e-5);
      const auto dv = [&](double vv, double ww) { return willmin::eval_irregular(c, vv, ww, 1); };
      const Vec3 fvv = (dv(v + h, w).pv - dv(v - h, w).pv) / (2.0 * h);
      const Vec3 fvw = (dv(v, w + h).pv - dv(v, w - h).pv) / (2.0 * h);
      const Vec3 fww = (dv(v, w + h).pw - dv(v, w - h).pw) / (2.0 * h);
      REQUIRE(max_component_diff(ev.pvv, fvv) < 1e-4);
      REQUIRE(max_component_diff(ev.pvw, fvw) < 1e-4);
      REQUIRE(max_component_diff(ev.pww, fww) < 1e-4);
    }
  }
}

TEST_CASE("irregular patch weights stay inside the convex hull") {
  std::mt19937_64 rng(105);
  for (int N : {3, 4, 5, 7}) {
    const int K = N + 6;
    for (int trial = 0; trial < 25; ++trial) {
      const auto [v, w] = random_param(rng);
      double sum = 0.0, mn = 1.0;
      for (int i = 0; i < K; ++i) {
        ControlMatrix c = ControlMatrix::Zero(K, 3);
        c(i, 0) = 1.0;
        const double wi = willmin::eval_irregular(c, v, w, 0).p[0];
        sum += wi;
        mn = std::min(mn, wi);
      }
      REQUIRE_THAT(sum, WithinAbs(1.0, 1e-11));
      REQUIRE(mn >= -1e-12);
    }
  }
}

TEST_CASE("evaluation is continuous across ring and subpatch boundaries") {
  const ControlMatrix c = random_controls(11, 404);  // N = 5
  const auto at = [&](double v, double w) { return willmin::eval_irregular(c, v, w, 0).p; };
  for (double b : {0.5, 0.25, 0.125}) {
    CHECK(max_component_diff(at(b - 1e-13, 0.1 * b), at(b + 1e-13, 0.1 * b)) < 1e-9);
  }
  // across the middle-subpatch boundary v = 1/2 at fixed v+w level
  CHECK(max_component_diff(at(0.5 - 1e-13, 0.3), at(0.5 + 1e-13, 0.3)) < 1e-9);
  // limit point continuity along the diagonal toward the extraordinary vertex
  const Vec3 lim = willmin::eval_irregular(c, 0.0, 0.0, 0).p;
  CHECK(max_component_diff(at(1e-9, 1e-9), lim) < 1e-6);
  CHECK_THROWS_AS(willmin::eval_irregular(c, 0.0, 0.0, 1), willmin::Error);
}

TEST_CASE("patch tables classify the once-subdivided octahedron") {
  const TriMesh m = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, false);
  const willmin::PatchTables pt = willmin::build_patch_tables(m);
  int irregular = 0, regular = 0;
  for (const auto& p : pt.patches) {
    if (p.regular) {
      ++regular;
      REQUIRE(p.vfl.size() == 12);
    } else {
      ++irregular;
      REQUIRE(p.valence == 4);
      REQUIRE(p.vfl.size() == 10);  // N + 6 controls
    }
  }
  CHECK(regular == 8);
  CHECK(irregular == 24);

  // Control lists stay within the two-ring of the face corners.
  const auto rings = willmin::all_one_rings(m);
  for (Index f = 0; f < m.face_count(); ++f) {
    std::set<Index> within;
    for (int k = 0; k < 3; ++k) {
      const Index v = m.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(k)];
      within.insert(v);
      for (Index u : rings[static_cast<std::size_t>(v)].neighbors) {
        within.insert(u);
        for (Index t : rings[static_cast<std::size_t>(u)].neighbors) within.insert(t);
      }
    }
    for (Index id : pt.patches[static_cast<std::size_t>(f)].vfl) REQUIRE(within.count(id) == 1);
  }
}

TEST_CASE("patch tables reject adjacent extraordinary vertices") {
  const TriMesh m = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 0, false);
  CHECK_THROWS_MATCHES(willmin::build_patch_tables(m), willmin::Error,
                       MessageMatches(ContainsSubstring("midpoint_subdivide")));
}

TEST_CASE("all-regular torus grids get 12-control patches everywhere") {
  const TriMesh t = willmin::revolution_torus(5, 4, 2.0, 0.7);
  const willmin::PatchTables pt = willmin::build_patch_tables(t);
  for (const auto& p : pt.patches) {
    REQUIRE(p.regular);
    REQUIRE(p.vfl.size() == 12);
  }
}

TEST_CASE("coalescing two-rings repeat control indices") {
  const TriMesh m = willmin::sphere_mesh(willmin::SphereKind::Tetrahedron, 1, false);
  const willmin::PatchTables pt = willmin::build_patch_tables(m);
  bool any_repeat = false;
  for (const auto& p : pt.patches) {
    std::set<Index> uniq(p.vfl.begin(), p.vfl.end());
    if (uniq.size() < p.vfl.size()) any_repeat = true;
  }
  CHECK(any_repeat);  // 10 vertices cannot fill a 12-entry stencil
}

namespace {

// Shared fixture for subdivision-consistency checks: evaluates face f of the
// coarse mesh against the four child patches of the once-loop-subdivided
// mesh at corresponding parameters.
void check_face_stationarity(const TriMesh& m, const willmin::PatchTables& pt,
                             const TriMesh& m2, const willmin::PatchTables& pt2, Index f,
                             std::mt19937_64& rng) {
  const willmin::EdgeTable et = willmin::build_edge_table(m);
  const auto& fv = m.faces[static_cast<std::size_t>(f)];
  const int rot = pt.patches[static_cast<std::size_t>(f)].corner_rot;
  const Index nv = m.vertex_count();

  // Patch-parameter positions of the six relevant subdivided-mesh vertices.
  std::map<Index, std::pair<double, double>> param;
  const Index ce = fv[static_cast<std::size_t>(rot)];
  const Index ca = fv[static_cast<std::size_t>((rot + 1) % 3)];
  const Index cb = fv[static_cast<std::size_t>((rot + 2) % 3)];
  param[ce] = {0.0, 0.0};
  param[ca] = {1.0, 0.0};
  param[cb] = {0.0, 1.0};
  const auto& fe = et.face_edges[static_cast<std::size_t>(f)];
  // fe[k] is the edge between corners k+1 and k+2 of the stored face.
  const auto edge_param = [&](int k1, int k2) {
    const auto p1 = param[fv[static_cast<std::size_t>(k1)]];
    const auto p2 = param[fv[static_cast<std::size_t>(k2)]];
    return std::make_pair(0.5 * (p1.first + p2.first), 0.5 * (p1.second + p2.second));
  };
  param[nv + fe[0]] = edge_param(1, 2);
  param[nv + fe[1]] = edge_param(2, 0);
  param[nv + fe[2]] = edge_param(0, 1);

  for (int child = 0; child < 4; ++child) {
    const Index cf = 4 * f + child;
    const int crot = pt2.patches[static_cast<std::size_t>(cf)].corner_rot;
    std::array<std::pair<double, double>, 3> corner;
    for (int k = 0; k < 3; ++k) {
      const Index cv = m2.faces[static_cast<std::size_t>(cf)][static_cast<std::size_t>((crot + k) % 3)];
      REQUIRE(param.count(cv) == 1);
      corner[static_cast<std::size_t>(k)] = param[cv];
    }
    for (int trial = 0; trial < 12; ++trial) {
      const auto [vc, wc] = random_param(rng, 1e-4);
      const double u = 1.0 - vc - wc;
      const double v = u * corner[0].first + vc * corner[1].first + wc * corner[2].first;
      const double w = u * corner[0].second + vc * corner[1].second + wc * corner[2].second;
      const Vec3 coarse = willmin::evaluate_patch(m, pt, f, v, w, 0).p;
      const Vec3 fine = willmin::evaluate_patch(m2, pt2, cf, vc, wc, 0).p;
      REQUIRE(max_component_diff(coarse, fine) < 1e-10);
    }
  }
}

}  // namespace

TEST_CASE("patches are stationary under one loop subdivision step") {
  std::mt19937_64 rng(106);
  std::vector<TriMesh> meshes;
  meshes.push_back(willmin::sphere_mesh(willmin::SphereKind::Tetrahedron, 1, false));  // N=3
  meshes.push_back(willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true));    // N=4
  meshes.push_back(willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true));   // N=5
  meshes.push_back(willmin::midpoint_subdivide(
      flip_one_edge(willmin::revolution_torus(6, 6, 2.0, 0.6))));  // N=5 and N=7
  meshes.push_back(willmin::revolution_torus(4, 5, 2.0, 0.7));     // all regular

  for (const TriMesh& m : meshes) {
    const willmin::PatchTables pt = willmin::build_patch_tables(m);
    const TriMesh m2 = willmin::loop_subdivide(m);
    const willmin::PatchTables pt2 = willmin::build_patch_tables(m2);

    // One irregular face per distinct valence, plus one regular face.
    std::map<Index, Index> by_valence;
    Index reg = -1;
    for (Index f = 0; f < m.face_count(); ++f) {
      const auto& p = pt.patches[static_cast<std::size_t>(f)];
      if (p.regular) {
        if (reg < 0) reg = f;
      } else if (!by_valence.count(p.valence)) {
        by_valence[p.valence] = f;
      }
    }
    if (reg >= 0) check_face_stationarity(m, pt, m2, pt2, reg, rng);
    for (const auto& [valence, f] : by_valence) {
      INFO("valence " << valence);
      check_face_stationarity(m, pt, m2, pt2, f, rng);
    }
  }
}

TEST_CASE("adjacent patches agree along shared boundaries") {
  std::mt19937_64 rng(107);
  std::vector<TriMesh> meshes;
  meshes.push_back(willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true));
  meshes.push_back(willmin::revolution_torus(5, 4, 2.0, 0.7));
  for (const TriMesh& m : meshes) {
    const willmin::PatchTables pt = willmin::build_patch_tables(m);
    const willmin::EdgeTable et = willmin::build_edge_table(m);
    std::uniform_real_distribution<double> uni(1e-3, 1.0 - 1e-3);
    for (std::size_t e = 0; e < et.edges.size(); e += 3) {
      const willmin::Edge& ed = et.edges[e];
      // Parameter position of vertex x within face f's patch.
      const auto corner_param = [&](Index f, Index x) {
        const int rot = pt.patches[static_cast<std::size_t>(f)].corner_rot;
        const auto& fv = m.faces[static_cast<std::size_t>(f)];
        for (int k = 0; k < 3; ++k) {
          if (fv[static_cast<std::size_t>((rot + k) % 3)] == x) {
            if (k == 0) return std::make_pair(0.0, 0.0);
            if (k == 1) return std::make_pair(1.0, 0.0);
            return std::make_pair(0.0, 1.0);
          }
        }
        FAIL("corner not found");
        return std::make_pair(0.0, 0.0);
      };
      const auto pa1 = corner_param(ed.face_ab, ed.a);
      const auto pb1 = corner_param(ed.face_ab, ed.b);
      const auto pa2 = corner_param(ed.face_ba, ed.a);
      const auto pb2 = corner_param(ed.face_ba, ed.b);
      for (int trial = 0; trial < 6; ++trial) {
        const double t = uni(rng);
        const double v1 = (1 - t) * pa1.first + t * pb1.first;
        const double w1 = (1 - t) * pa1.second + t * pb1.second;
        const double v2 = (1 - t) * pa2.first + t * pb2.first;
        const double w2 = (1 - t) * pa2.second + t * pb2.second;
        const Vec3 s1 = willmin::evaluate_patch(m, pt, ed.face_ab, v1, w1, 0).p;
        const Vec3 s2 = willmin::evaluate_patch(m, pt, ed.face_ba, v2, w2, 0).p;
        REQUIRE(max_component_diff(s1, s2) < 1e-10);
      }
    }
  }
}

TEST_CASE("repeated subdivision converges to evaluated limit positions") {
  const TriMesh m = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  const willmin::PatchTables pt = willmin::build_patch_tables(m);
  Index f = -1;
  for (Index i = 0; i < m.face_count(); ++i)
    if (!pt.patches[static_cast<std::size_t>(i)].regular) {
      f = i;
      break;
    }
  REQUIRE(f >= 0);
  const int rot = pt.patches[static_cast<std::size_t>(f)].corner_rot;
  const Index ev = m.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(rot)];
  const Vec3 limit = willmin::evaluate_patch(m, pt, f, 0.0, 0.0, 0).p;

  TriMesh cur = m;
  double prev = willmin::kInf;
  for (int level = 0; level < 7; ++level) cur = willmin::loop_subdivide(cur);
  const double err = max_component_diff(cur.vertices[static_cast<std::size_t>(ev)], limit);
  // Deviations contract by the subdominant eigenvalue 3/8 per level.
  CHECK(err < 5e-3);
  (void)prev;
}
