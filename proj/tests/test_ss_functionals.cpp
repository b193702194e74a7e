#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "willmin/generators.hpp"
#include "willmin/pl_functionals.hpp"
#include "willmin/ss_functionals.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using willmin::ControlMatrix;
using willmin::Index;
using willmin::PatchTables;
using willmin::QuadBasisTable;
using willmin::QuadRule;
using willmin::TriMesh;
using willmin::ValenceTable;
using willmin::Vec3;

namespace {

constexpr double kFourPi = 4.0 * willmin::kPi;

// Control data of the first regular / first irregular face of a mesh.
ControlMatrix first_patch_controls(const TriMesh& mesh, const PatchTables& pt, bool regular,
                                   int* valence = nullptr) {
  for (std::size_t f = 0; f < pt.patches.size(); ++f) {
    if (pt.patches[f].regular == regular) {
      if (valence) *valence = static_cast<int>(pt.patches[f].valence);
      return willmin::gather_controls(mesh, pt.patches[f]);
    }
  }
  FAIL("no patch of the requested kind");
  return ControlMatrix();
}

TriMesh rotated_translated(const TriMesh& mesh, const Vec3& axis, double angle, const Vec3& t) {
  const Vec3 k = willmin::normalized(axis);
  const double c = std::cos(angle), s = std::sin(angle);
  TriMesh out = mesh;
  for (Vec3& p : out.vertices) {
    const Vec3 rotated = p * c + cross(k, p) * s + k * (dot(k, p) * (1.0 - c));
    p = rotated + t;
  }
  return out;
}

double fd_patch_value(const ControlMatrix& c, const ValenceTable& t, unsigned which,
                      double willmin::PatchValues::*member, Eigen::Index row, int col, double h) {
  ControlMatrix cp = c, cm = c;
  cp(row, col) += h;
  cm(row, col) -= h;
  return (willmin::patch_functionals(cp, t, which).*member -
          willmin::patch_functionals(cm, t, which).*member) /
         (2.0 * h);
}

void check_patch_gradient(const ControlMatrix& c, const ValenceTable& t) {
  const willmin::PatchGradients g = willmin::patch_gradients(c, t, willmin::kFnAll);
  const struct {
    const char* name;
    unsigned mask;
    double willmin::PatchValues::*value;
    const ControlMatrix* grad;
  } items[] = {{"A", willmin::kFnA, &willmin::PatchValues::A, &g.A},
               {"V", willmin::kFnV, &willmin::PatchValues::V, &g.V},
               {"M", willmin::kFnM, &willmin::PatchValues::M, &g.M},
               {"W", willmin::kFnW, &willmin::PatchValues::W, &g.W}};
  const double h = 1e-5;
  for (const auto& item : items) {
    const double scale = std::max(1.0, item.grad->cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      for (int col = 0; col < 3; ++col) {
        const double fd = fd_patch_value(c, t, item.mask, item.value, r, col, h);
        worst = std::max(worst, std::abs(fd - (*item.grad)(r, col)) / scale);
      }
    }
    INFO("functional " << item.name);
    CHECK(worst <= 1e-6);
  }
}

}  // namespace

TEST_CASE("fundamental forms recover the round sphere") {
  const double R = 2.0;
  for (auto [v, w] : {std::pair{0.3, -0.4}, {1.2, 0.7}, {-2.0, 0.1}, {4.0, -1.1}}) {
    const double cv = std::cos(v), sv = std::sin(v), cw = std::cos(w), sw = std::sin(w);
    const Vec3 s{R * cv * cw, R * sv * cw, R * sw};
    const Vec3 s_v{-R * sv * cw, R * cv * cw, 0.0};
    const Vec3 s_w{-R * cv * sw, -R * sv * sw, R * cw};
    const Vec3 s_vv{-R * cv * cw, -R * sv * cw, 0.0};
    const Vec3 s_vw{R * sv * sw, -R * cv * sw, 0.0};
    const Vec3 s_ww = -s;
    const willmin::FundamentalForms ff = willmin::fundamental_forms(s_v, s_w, s_vv, s_vw, s_ww);

    // The unnormalized normal is outward and |n|^2 = EG - F^2 identically.
    CHECK(dot(ff.n, s) > 0.0);
    CHECK_THAT(norm2(ff.n), WithinRel(ff.det(), 1e-12));
    // Outward normal makes H = -1/R: the sphere has positive total mean
    // curvature M = -int H dA = 4 pi R in this sign convention.
    CHECK_THAT(ff.Hbar / norm(ff.n), WithinRel(-1.0 / R, 1e-12));
    const double K = (ff.ebar * ff.gbar - ff.fbar * ff.fbar) / (ff.det() * ff.det());
    CHECK_THAT(K, WithinRel(1.0 / (R * R), 1e-12));
  }
}

TEST_CASE("basis tables satisfy partition of unity row sums") {
  const QuadRule rule = willmin::make_quadrature(2, 16);
  for (int valence : {6, 4, 5, 7}) {
    const ValenceTable t = willmin::make_valence_table(valence, rule);
    REQUIRE(t.basis[0].cols() == (valence == 6 ? 12 : valence + 6));
    REQUIRE(t.basis[0].rows() == t.weights.size());
    for (int k = 0; k < 6; ++k) {
      const double target = k == 0 ? 1.0 : 0.0;
      const double worst = (t.basis[static_cast<std::size_t>(k)].rowwise().sum().array() - target)
                               .abs()
                               .maxCoeff();
      INFO("valence " << valence << " derivative slot " << k);
      CHECK(worst <= (valence == 6 ? 1e-12 : 1e-9));
    }
  }
}

TEST_CASE("irregular tables match direct patch evaluation") {
  const TriMesh mesh = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(mesh);
  int valence = 0;
  const ControlMatrix c = first_patch_controls(mesh, pt, false, &valence);
  REQUIRE(valence == 5);

  const QuadRule rule = willmin::make_quadrature(2, 8);
  const ValenceTable t = willmin::make_valence_table(5, rule);
  for (Eigen::Index i = 0; i < t.weights.size(); i += 37) {
    const willmin::PatchEval direct = willmin::eval_irregular(c, t.pv(i), t.pw(i), 2);
    const Vec3 expect[6] = {direct.p, direct.pv, direct.pw, direct.pvv, direct.pvw, direct.pww};
    for (int k = 0; k < 6; ++k) {
      const Eigen::RowVector3d from_table = t.basis[static_cast<std::size_t>(k)].row(i) * c;
      for (int j = 0; j < 3; ++j) {
        INFO("node " << i << " slot " << k << " coord " << j);
        CHECK_THAT(from_table(j), WithinAbs(expect[k][j], 1e-9 * std::max(1.0, norm(expect[k]))));
      }
    }
  }
}

TEST_CASE("patch values scale with control dimension") {
  const TriMesh icosa = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true);
  const PatchTables pt_icosa = willmin::build_patch_tables(icosa);
  const TriMesh torus = willmin::revolution_torus(6, 6, 2.0, 0.7);
  const PatchTables pt_torus = willmin::build_patch_tables(torus);

  const QuadRule rule = willmin::make_quadrature(2, 10);
  const ValenceTable t5 = willmin::make_valence_table(5, rule);
  const ValenceTable t6 = willmin::make_valence_table(6, rule);

  const double s = 1.7;
  for (const auto& [c, t] : {std::pair<ControlMatrix, const ValenceTable*>{
                                 first_patch_controls(icosa, pt_icosa, false), &t5},
                             {first_patch_controls(torus, pt_torus, true), &t6}}) {
    const willmin::PatchValues base = willmin::patch_functionals(c, *t, willmin::kFnAll);
    const willmin::PatchValues scaled =
        willmin::patch_functionals(ControlMatrix(s * c), *t, willmin::kFnAll);
    CHECK_THAT(scaled.A, WithinRel(s * s * base.A, 1e-10));
    CHECK_THAT(scaled.V, WithinRel(s * s * s * base.V, 1e-10));
    CHECK_THAT(scaled.M, WithinRel(s * base.M, 1e-10));
    CHECK_THAT(scaled.W, WithinRel(base.W, 1e-10));
  }
}

TEST_CASE("patch gradients match finite differences") {
  const QuadRule rule = willmin::make_quadrature(2, 10);

  SECTION("regular patch") {
    const TriMesh torus = willmin::revolution_torus(6, 6, 2.0, 0.7);
    const PatchTables pt = willmin::build_patch_tables(torus);
    check_patch_gradient(first_patch_controls(torus, pt, true),
                         willmin::make_valence_table(6, rule));
  }
  SECTION("irregular patch of valence 5") {
    const TriMesh icosa = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true);
    const PatchTables pt = willmin::build_patch_tables(icosa);
    check_patch_gradient(first_patch_controls(icosa, pt, false),
                         willmin::make_valence_table(5, rule));
  }
}

TEST_CASE("area gradient rows sum to zero") {
  const TriMesh icosa = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(icosa);
  const QuadRule rule = willmin::make_quadrature(2, 10);
  const ControlMatrix c = first_patch_controls(icosa, pt, false);
  const willmin::PatchGradients g =
      willmin::patch_gradients(c, willmin::make_valence_table(5, rule), willmin::kFnA);
  // Area is translation invariant, so the gradient annihilates translations.
  CHECK(g.A.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sphere control mesh obeys the Willmore bound") {
  const TriMesh mesh = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 2, true);
  const PatchTables pt = willmin::build_patch_tables(mesh);
  const QuadBasisTable qt = willmin::build_basis_tables(pt, willmin::make_quadrature(4, 12));
  const willmin::SsEnergies e = willmin::ss_energy(mesh, pt, qt, willmin::kFnAll, false);

  CHECK(e.W >= kFourPi - 1e-3);
  CHECK(e.W <= kFourPi * 1.01);
  CHECK(e.V > 0.0);
  CHECK(e.M > 0.0);
}

TEST_CASE("loop surface area shrinks strictly inside its control octahedron") {
  const TriMesh octa = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 0, false);
  const TriMesh control = willmin::loop_subdivide(octa);  // same limit surface
  const PatchTables pt = willmin::build_patch_tables(control);
  const QuadBasisTable qt = willmin::build_basis_tables(pt, willmin::make_quadrature(4, 12));
  const willmin::SsEnergies e = willmin::ss_energy(control, pt, qt, willmin::kFnA, false);
  CHECK(e.A < willmin::area(octa));
}

TEST_CASE("global gradients match finite differences") {
  TriMesh mesh = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(mesh);
  const QuadBasisTable qt = willmin::build_basis_tables(
      pt, willmin::make_quadrature(willmin::kDefaultQuadGrid, willmin::kDefaultRingDepth));
  const willmin::SsEnergies e = willmin::ss_energy(mesh, pt, qt, willmin::kFnAll, true);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, mesh.vertices.size() - 1);
  const double h = 1e-5;
  const struct {
    const char* name;
    unsigned mask;
    double willmin::SsEnergies::*value;
    const willmin::VertexVectorField* grad;
  } items[] = {{"A", willmin::kFnA, &willmin::SsEnergies::A, &e.grad_A},
               {"V", willmin::kFnV, &willmin::SsEnergies::V, &e.grad_V},
               {"M", willmin::kFnM, &willmin::SsEnergies::M, &e.grad_M},
               {"W", willmin::kFnW, &willmin::SsEnergies::W, &e.grad_W}};

  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t vtx = pick(rng);
    for (int col = 0; col < 3; ++col) {
      TriMesh plus = mesh, minus = mesh;
      plus.vertices[vtx][col] += h;
      minus.vertices[vtx][col] -= h;
      const willmin::SsEnergies ep = willmin::ss_energy(plus, pt, qt, willmin::kFnAll, false);
      const willmin::SsEnergies em = willmin::ss_energy(minus, pt, qt, willmin::kFnAll, false);
      for (const auto& item : items) {
        double scale = 1.0;
        for (const Vec3& g : *item.grad) scale = std::max(scale, norm(g));
        const double fd = (ep.*item.value - em.*item.value) / (2.0 * h);
        INFO("functional " << item.name << " vertex " << vtx << " coord " << col);
        CHECK_THAT(fd, WithinAbs((*item.grad)[vtx][col], 1e-5 * scale));
      }
    }
  }
}

TEST_CASE("functionals are equivariant under rigid motion") {
  const TriMesh mesh = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(mesh);
  const QuadBasisTable qt = willmin::build_basis_tables(pt, willmin::make_quadrature(2, 12));

  const Vec3 axis{0.3, -0.5, 0.8};
  const double angle = 0.9;
  const Vec3 shift{0.2, -0.7, 0.33};
  const TriMesh moved = rotated_translated(mesh, axis, angle, shift);

  const willmin::SsEnergies a = willmin::ss_energy(mesh, pt, qt, willmin::kFnAll, true);
  const willmin::SsEnergies b = willmin::ss_energy(moved, pt, qt, willmin::kFnAll, true);
  CHECK_THAT(b.A, WithinRel(a.A, 1e-10));
  CHECK_THAT(b.V, WithinRel(a.V, 1e-10));
  CHECK_THAT(b.M, WithinRel(a.M, 1e-10));
  CHECK_THAT(b.W, WithinRel(a.W, 1e-10));

  // Gradients rotate with the surface (the translation drops out).
  const Vec3 k = willmin::normalized(axis);
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 g = a.grad_W[i];
    const Vec3 rotated = g * c + cross(k, g) * s + k * (dot(k, g) * (1.0 - c));
    CHECK(norm(b.grad_W[i] - rotated) <= 1e-8);
  }
}

TEST_CASE("quadrature refinement tightens all four functionals") {
  const TriMesh mesh = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(mesh);
  willmin::SsEnergies e[3];
  const int grids[3] = {1, 2, 4};
  for (int i = 0; i < 3; ++i) {
    const QuadBasisTable qt =
        willmin::build_basis_tables(pt, willmin::make_quadrature(grids[i], 10));
    e[i] = willmin::ss_energy(mesh, pt, qt, willmin::kFnAll, false);
  }
  CHECK(std::abs(e[1].A - e[2].A) < std::abs(e[0].A - e[1].A));
  CHECK(std::abs(e[1].V - e[2].V) < std::abs(e[0].V - e[1].V));
  CHECK(std::abs(e[1].M - e[2].M) < std::abs(e[0].M - e[1].M));
  CHECK(std::abs(e[1].W - e[2].W) < std::abs(e[0].W - e[1].W));
}

TEST_CASE("gauss bonnet sees the topology") {
  const TriMesh sphere = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  const PatchTables pt_sphere = willmin::build_patch_tables(sphere);
  const QuadBasisTable qt_sphere =
      willmin::build_basis_tables(pt_sphere, willmin::make_quadrature(4, 14));
  CHECK_THAT(willmin::ss_gauss_bonnet(sphere, pt_sphere, qt_sphere), WithinRel(kFourPi, 0.01));

  const TriMesh torus = willmin::revolution_torus(8, 8, 2.0, 0.8);
  const PatchTables pt_torus = willmin::build_patch_tables(torus);
  const QuadBasisTable qt_torus =
      willmin::build_basis_tables(pt_torus, willmin::make_quadrature(4, 14));
  CHECK_THAT(willmin::ss_gauss_bonnet(torus, pt_torus, qt_torus), WithinAbs(0.0, 0.01 * kFourPi));
}

TEST_CASE("torus control grid matches refined quadrature") {
  const TriMesh torus = willmin::revolution_torus(32, 32, std::sqrt(2.0), 1.0);
  const PatchTables pt = willmin::build_patch_tables(torus);
  const QuadBasisTable coarse = willmin::build_basis_tables(pt, willmin::make_quadrature(4, 1));
  const QuadBasisTable fine = willmin::build_basis_tables(pt, willmin::make_quadrature(8, 1));
  const double w_coarse = willmin::ss_energy(torus, pt, coarse, willmin::kFnW, false).W;
  const double w_fine = willmin::ss_energy(torus, pt, fine, willmin::kFnW, false).W;
  CHECK_THAT(w_coarse, WithinRel(w_fine, 1e-6));
  // The control grid samples the Clifford-ratio torus of revolution, whose
  // limit surface carries W close to the 2 pi^2 optimum.
  CHECK_THAT(w_fine, WithinRel(2.0 * willmin::kPi * willmin::kPi, 0.02));
}

TEST_CASE("doubling ring depth leaves patch area unchanged") {
  const TriMesh icosa = willmin::sphere_mesh(willmin::SphereKind::Icosahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(icosa);
  const ControlMatrix c = first_patch_controls(icosa, pt, false);
  const ValenceTable t16 = willmin::make_valence_table(5, willmin::make_quadrature(2, 16));
  const ValenceTable t32 = willmin::make_valence_table(5, willmin::make_quadrature(2, 32));
  const double a16 = willmin::patch_functionals(c, t16, willmin::kFnA).A;
  const double a32 = willmin::patch_functionals(c, t32, willmin::kFnA).A;
  CHECK_THAT(a16, WithinRel(a32, 1e-10));
}

TEST_CASE("basis table cache round trips") {
  const TriMesh mesh = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  const PatchTables pt = willmin::build_patch_tables(mesh);
  const QuadBasisTable qt = willmin::build_basis_tables(pt, willmin::make_quadrature(2, 4));
  const std::string path = "qbt_cache_test.bin";

  REQUIRE(willmin::save_basis_tables(path, qt));
  const auto loaded = willmin::load_basis_tables(path, 2, 4, {4, 6});
  REQUIRE(loaded.has_value());
  CHECK(loaded->n == 2);
  CHECK(loaded->D == 4);
  REQUIRE(loaded->tables.size() == qt.tables.size());
  for (const auto& [valence, t] : qt.tables) {
    const ValenceTable& lt = loaded->tables.at(valence);
    CHECK((lt.weights - t.weights).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < 6; ++k)
      CHECK((lt.basis[static_cast<std::size_t>(k)] - t.basis[static_cast<std::size_t>(k)])
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }

  CHECK_FALSE(willmin::load_basis_tables(path, 4, 4, {4, 6}).has_value());
  CHECK_FALSE(willmin::load_basis_tables(path, 2, 8, {4, 6}).has_value());
  CHECK_FALSE(willmin::load_basis_tables(path, 2, 4, {5, 6}).has_value());
  CHECK_FALSE(willmin::load_basis_tables(path, 2, 4, {6}).has_value());
  CHECK_FALSE(willmin::load_basis_tables("no_such_file.bin", 2, 4, {4, 6}).has_value());

  {
    std::ofstream junk(path, std::ios::binary);
    junk << "WMQBgarbage";
  }
  CHECK_FALSE(willmin::load_basis_tables(path, 2, 4, {4, 6}).has_value());
  std::remove(path.c_str());
}

TEST_CASE("degenerate patches are rejected as not immersed") {
  const QuadRule rule = willmin::make_quadrature(1, 2);
  const ValenceTable t = willmin::make_valence_table(6, rule);
  const ControlMatrix zeros = ControlMatrix::Zero(12, 3);
  CHECK_THROWS_MATCHES(willmin::patch_functionals(zeros, t, willmin::kFnAll), willmin::Error,
                       MessageMatches(ContainsSubstring("immersed")));

  TriMesh collapsed = willmin::sphere_mesh(willmin::SphereKind::Octahedron, 1, true);
  for (Vec3& p : collapsed.vertices) p = Vec3{0.0, 0.0, 0.0};
  const PatchTables pt = willmin::build_patch_tables(collapsed);
  const QuadBasisTable qt = willmin::build_basis_tables(pt, rule);
  try {
    willmin::ss_energy(collapsed, pt, qt, willmin::kFnAll, false);
    FAIL("expected a throw");
  } catch (const willmin::Error& e) {
    CHECK(e.kind() == willmin::Error::Kind::Numerical);
    CHECK_THAT(e.what(), ContainsSubstring("face 0"));
    CHECK_THAT(e.what(), ContainsSubstring("node"));
  }
}
