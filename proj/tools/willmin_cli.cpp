// willmin: mesh generation, energy evaluation, gradient checks, constrained
// Willmore/Canham/Helfrich flows, and closed-form verification sweeps.
//
// Exit codes: 0 success or feasible termination, 2 infeasible termination,
// 3 input error, 4 numerical failure. JSON and CSV output is deterministic:
// identical invocations produce identical numeric fields, and `solve
// --deterministic` additionally zeroes the wall-clock timing so whole report
// files compare byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "willmin/closed_forms.hpp"
#include "willmin/common.hpp"
#include "willmin/generators.hpp"
#include "willmin/mesh.hpp"
#include "willmin/mesh_io.hpp"
#include "willmin/optimizer.hpp"
#include "willmin/pl_functionals.hpp"
#include "willmin/quadrature.hpp"
#include "willmin/ss_functionals.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

int exit_code(const willmin::Error& e) {
  switch (e.kind()) {
    case willmin::Error::Kind::Input: return kExitInput;
    case willmin::Error::Kind::Numerical: return kExitNumerical;
    case willmin::Error::Kind::Infeasible: return kExitInfeasible;
  }
  return kExitNumerical;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) willmin::throw_input("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  char out[19];
  std::snprintf(out, sizeof out, "0x%016llx",
                static_cast<unsigned long long>(willmin::fnv1a(bytes.data(), bytes.size())));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) willmin::throw_input("cannot write " + path);
  out << text;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

willmin::Vec3 parse_vec3(const std::string& s) {
  willmin::Vec3 v;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(s);
  if (!(in >> v.x >> sep1 >> v.y >> sep2 >> v.z) || sep1 != ',' || sep2 != ',')
    willmin::throw_input("expected x,y,z but got '" + s + "'");
  return v;
}

// Shared flag bundles -------------------------------------------------------

struct SsFlags {
  int quad_grid = 8;
  int ring_depth = 16;
  void attach(CLI::App* cmd) {
    cmd->add_option("--quad-grid", quad_grid,
                    "Quadrature subdivisions per direction (power of two)");
    cmd->add_option("--ring-depth", ring_depth, "Ring depth around extraordinary vertices");
  }
};

struct StructureFlags {
  std::string structure = "equilateral";
  std::string omega = "0.5,0.8660254037844386";
  int grid_m = 0, grid_n = 0;
  void attach(CLI::App* cmd) {
    cmd->add_option("--structure", structure, "Reference conformal structure for Dirichlet")
        ->check(CLI::IsMember({"equilateral", "lattice"}));
    cmd->add_option("--omega", omega, "Lattice modulus as re,im");
    cmd->add_option("--grid-m", grid_m, "Torus grid rows (lattice structure)");
    cmd->add_option("--grid-n", grid_n, "Torus grid columns (lattice structure)");
  }
  willmin::ConformalStructure resolve() const {
    if (structure == "equilateral") return willmin::ConformalStructure::equilateral();
    std::istringstream in(omega);
    double re = 0, im = 0;
    char sep = 0;
    if (!(in >> re >> sep >> im) || sep != ',')
      willmin::throw_input("expected --omega re,im but got '" + omega + "'");
    return willmin::ConformalStructure::torus_lattice({re, im}, grid_m, grid_n);
  }
};

// mesh gen -------------------------------------------------------------------

struct GenArgs {
  int m = 10, n = 20;
  double eps = 0.0;
  std::vector<double> radii;
  std::string kind = "octahedron";
  int levels = 0;
  bool project = false;
  double flatten = 0.0;
  int rev_m = 16, rev_n = 16;
  double big_r = std::sqrt(2.0), small_r = 1.0;
  std::string out = "out.obj";
};

willmin::SphereKind sphere_kind(const std::string& s) {
  if (s == "octahedron") return willmin::SphereKind::Octahedron;
  if (s == "icosahedron") return willmin::SphereKind::Icosahedron;
  if (s == "tetrahedron") return willmin::SphereKind::Tetrahedron;
  willmin::throw_input("unknown sphere kind '" + s + "'");
}

int run_gen(const std::string& which, const GenArgs& a) {
  willmin::TriMesh mesh;
  if (which == "sph-torus") {
    mesh = willmin::spherical_torus(a.m, a.n, a.eps);
  } else if (which == "plan-torus") {
    mesh = willmin::planar_torus(a.m, a.n, a.radii);
  } else if (which == "sphere") {
    mesh = willmin::sphere_mesh(sphere_kind(a.kind), a.levels, a.project,
                                a.flatten > 0.0 ? std::optional<double>(a.flatten)
                                                : std::nullopt);
  } else {
    mesh = willmin::revolution_torus(a.rev_m, a.rev_n, a.big_r, a.small_r);
  }
  willmin::write_mesh(mesh, a.out);
  std::cout << "wrote " << a.out << ": " << mesh.vertex_count() << " vertices, "
            << mesh.face_count() << " faces\n";
  return kExitOk;
}

// energy ---------------------------------------------------------------------

struct EnergyArgs {
  std::string mesh_path;
  std::string out;
  bool a = false, v = false, m_cotan = false, m_steiner = false;
  bool w_centroid = false, w_voronoi = false, w_effarea = false, w_normalcur = false;
  bool w_bobenko = false, dirichlet = false, ss = false, reduced = false, all = false;
  bool invert = false;
  std::string invert_center = "0,0,2.5";
  double invert_radius = 1.0;
  SsFlags ssf;
  StructureFlags structure;
};

int run_energy(EnergyArgs& a) {
  const std::string hash = file_hash(a.mesh_path);
  willmin::TriMesh mesh = willmin::read_mesh(a.mesh_path);
  if (a.invert) mesh = willmin::invert_sphere(mesh, parse_vec3(a.invert_center), a.invert_radius);

  const bool any = a.a || a.v || a.m_cotan || a.m_steiner || a.w_centroid || a.w_voronoi ||
                   a.w_effarea || a.w_normalcur || a.w_bobenko || a.dirichlet || a.ss ||
                   a.reduced;
  if (a.all || !any) {
    a.a = a.v = a.m_cotan = a.m_steiner = true;
    a.w_centroid = a.w_voronoi = a.w_effarea = a.w_normalcur = a.w_bobenko = true;
    a.dirichlet = a.reduced = true;
  }

  json doc;
  doc["schema"] = "willmin-energy/1";
  doc["version"] = kVersion;
  doc["mesh"] = a.mesh_path;
  doc["mesh_hash"] = hash;
  doc["inverted"] = a.invert;

  int rc = kExitOk;
  auto guard = [&](const char* key, auto&& fn) {
    try {
      doc[key] = fn();
    } catch (const willmin::Error& e) {
      doc[key] = json{{"error", e.what()}};
      if (rc == kExitOk) rc = exit_code(e);
    }
  };

  if (a.a) guard("A", [&] { return willmin::area(mesh); });
  if (a.v) guard("V", [&] { return willmin::volume(mesh); });
  if (a.m_cotan)
    guard("M_Cotan", [&] { return willmin::m_pl(mesh, willmin::MVariant::Cotan).value; });
  if (a.m_steiner)
    guard("M_Steiner", [&] { return willmin::m_pl(mesh, willmin::MVariant::Steiner).value; });
  const std::pair<const char*, willmin::WVariant> wvars[] = {
      {"W_Centroid", willmin::WVariant::Centroid},
      {"W_Voronoi", willmin::WVariant::Voronoi},
      {"W_EffArea", willmin::WVariant::EffArea},
      {"W_NormalCur", willmin::WVariant::NormalCur},
      {"W_Bobenko", willmin::WVariant::Bobenko}};
  const bool wsel[] = {a.w_centroid, a.w_voronoi, a.w_effarea, a.w_normalcur, a.w_bobenko};
  for (int i = 0; i < 5; ++i)
    if (wsel[i]) {
      const auto var = wvars[i].second;
      guard(wvars[i].first, [&] { return willmin::w_pl(mesh, var).value; });
    }
  if (a.dirichlet)
    guard("Dirichlet", [&] {
      return willmin::dirichlet_energy(mesh, a.structure.resolve()).value;
    });
  if (a.ss)
    guard("SS", [&]() -> json {
      const willmin::PatchTables pt = willmin::build_patch_tables(mesh);
      const willmin::QuadBasisTable qt = willmin::build_basis_tables(
          pt, willmin::make_quadrature(a.ssf.quad_grid, a.ssf.ring_depth));
      const willmin::SsEnergies s =
          willmin::ss_energy(mesh, pt, qt, willmin::kFnAll, false);
      return json{{"A", s.A}, {"V", s.V}, {"M", s.M}, {"W", s.W}};
    });
  if (a.reduced)
    guard("reduced", [&]() -> json {
      const double A = willmin::area(mesh);
      const double V = willmin::volume(mesh);
      const double M = willmin::m_pl(mesh, willmin::MVariant::Cotan).value;
      const auto red = willmin::reduced_quantities(A, V, M);
      return json{{"v0", red.first}, {"m0", red.second}};
    });

  emit(doc.dump(2) + "\n", a.out);
  return rc;
}

// gradcheck ------------------------------------------------------------------

struct GradcheckArgs {
  std::string mesh_path;
  std::string out;
  std::vector<std::string> functionals;
  bool all = false;
  int samples = 20;
  unsigned seed = 7;
  double h = 1e-6;
  SsFlags ssf;
  StructureFlags structure;
};

// Smallest |sin| of the circumcircle intersection angle over all edge quads.
// Inverting about edge endpoint a maps both circles through a to lines, so
// cocircular quads (the non-smooth set of the circle energy) give parallel
// directions and a vanishing sine.
double min_cocircularity_sine(const willmin::TriMesh& mesh) {
  const willmin::EdgeTable et = willmin::build_edge_table(mesh);
  double best = willmin::kInf;
  for (const willmin::Edge& ed : et.edges) {
    const willmin::Vec3& pa = mesh.vertices[static_cast<std::size_t>(ed.a)];
    auto inv = [&](willmin::Index v) {
      const willmin::Vec3 d = mesh.vertices[static_cast<std::size_t>(v)] - pa;
      return d * (1.0 / willmin::norm2(d));
    };
    const willmin::Vec3 pb = inv(ed.b), pr = inv(ed.opposite_ab), ps = inv(ed.opposite_ba);
    const willmin::Vec3 u = willmin::normalized(pb - pr);
    const willmin::Vec3 w = willmin::normalized(ps - pb);
    best = std::min(best, willmin::norm(willmin::cross(u, w)));
  }
  return best;
}

int run_gradcheck(GradcheckArgs& a) {
  const std::string hash = file_hash(a.mesh_path);
  const willmin::TriMesh mesh = willmin::read_mesh(a.mesh_path);

  const std::vector<std::string> known = {"a",          "v",           "m-cotan",
                                          "m-steiner",  "w-centroid",  "w-voronoi",
                                          "w-effarea",  "w-normalcur", "w-bobenko",
                                          "dirichlet",  "ss-a",        "ss-v",
                                          "ss-m",       "ss-w"};
  if (a.all || a.functionals.empty()) a.functionals = known;

  // SS tables depend only on connectivity, which finite differencing keeps.
  willmin::PatchTables pt;
  willmin::QuadBasisTable qt;
  bool ss_ready = false;
  auto ss_eval = [&](const willmin::TriMesh& m, unsigned which, bool grad) {
    if (!ss_ready) {
      pt = willmin::build_patch_tables(mesh);
      qt = willmin::build_basis_tables(
          pt, willmin::make_quadrature(a.ssf.quad_grid, a.ssf.ring_depth));
      ss_ready = true;
    }
    return willmin::ss_energy(m, pt, qt, which, grad);
  };

  auto evaluate = [&](const std::string& name,
                      const willmin::TriMesh& m) -> willmin::EnergyResult {
    if (name == "a") return {willmin::area(m), willmin::grad_area(m)};
    if (name == "v") return {willmin::volume(m), willmin::grad_volume(m)};
    if (name == "m-cotan") return willmin::m_pl(m, willmin::MVariant::Cotan);
    if (name == "m-steiner") return willmin::m_pl(m, willmin::MVariant::Steiner);
    if (name == "w-centroid") return willmin::w_pl(m, willmin::WVariant::Centroid);
    if (name == "w-voronoi") return willmin::w_pl(m, willmin::WVariant::Voronoi);
    if (name == "w-effarea") return willmin::w_pl(m, willmin::WVariant::EffArea);
    if (name == "w-normalcur") return willmin::w_pl(m, willmin::WVariant::NormalCur);
    if (name == "w-bobenko") return willmin::w_pl(m, willmin::WVariant::Bobenko);
    if (name == "dirichlet") return willmin::dirichlet_energy(m, a.structure.resolve());
    const unsigned which = name == "ss-a"   ? willmin::kFnA
                           : name == "ss-v" ? willmin::kFnV
                           : name == "ss-m" ? willmin::kFnM
                                            : willmin::kFnW;
    const willmin::SsEnergies s = ss_eval(m, which, true);
    if (name == "ss-a") return {s.A, s.grad_A};
    if (name == "ss-v") return {s.V, s.grad_V};
    if (name == "ss-m") return {s.M, s.grad_M};
    return {s.W, s.grad_W};
  };

  json doc;
  doc["schema"] = "willmin-gradcheck/1";
  doc["version"] = kVersion;
  doc["mesh"] = a.mesh_path;
  doc["mesh_hash"] = hash;
  doc["h"] = a.h;
  doc["samples"] = a.samples;
  doc["seed"] = a.seed;
  json results;

  int rc = kExitOk;
  for (const std::string& name : a.functionals) {
    if (std::find(known.begin(), known.end(), name) == known.end())
      willmin::throw_input("unknown functional '" + name + "'");
    try {
      if (name == "w-bobenko") {
        const double s = min_cocircularity_sine(mesh);
        if (s < 1e-6) {
          // The circle energy is non-smooth where adjacent triangles share a
          // circumcircle; a finite-difference check there is meaningless.
          results[name] = json{{"error",
                                "non-smooth point: two adjacent triangles lie on (or "
                                "near) a common circle; gradient check not applicable"},
                               {"min_cocircularity_sine", s}};
          if (rc == kExitOk) rc = kExitNumerical;
          continue;
        }
      }
      const willmin::EnergyResult base = evaluate(name, mesh);
      std::mt19937_64 rng(a.seed);
      std::uniform_int_distribution<std::size_t> pick_v(0, mesh.vertices.size() - 1);
      std::uniform_int_distribution<int> pick_c(0, 2);
      // Vector-relative error over the sampled components. Symmetric meshes
      // have components that vanish identically; comparing those against
      // finite-difference roundoff one by one would report pure noise.
      double max_abs = 0.0, scale = 0.0;
      for (int k = 0; k < a.samples; ++k) {
        const std::size_t v = pick_v(rng);
        const int c = pick_c(rng);
        willmin::TriMesh m = mesh;
        m.vertices[v][c] += a.h;
        const double fp = evaluate(name, m).value;
        m.vertices[v][c] -= 2.0 * a.h;
        const double fm = evaluate(name, m).value;
        const double fd = (fp - fm) / (2.0 * a.h);
        const double an = base.gradient[v][c];
        max_abs = std::max(max_abs, std::abs(an - fd));
        scale = std::max({scale, std::abs(an), std::abs(fd)});
      }
      results[name] = json{{"max_rel_err", max_abs / std::max(scale, 1e-12)},
                           {"max_abs_err", max_abs},
                           {"grad_scale", scale}};
    } catch (const willmin::Error& e) {
      results[name] = json{{"error", e.what()}};
      if (rc == kExitOk) rc = exit_code(e);
    }
  }
  doc["results"] = std::move(results);
  emit(doc.dump(2) + "\n", a.out);
  return rc;
}

// verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::string id;
  std::string out;
  int m = 0, n = 0;
  std::vector<double> eps;
  std::vector<double> ratios;
  std::vector<double> params;
  int count = 20;
  unsigned seed = 1;
};

int run_verify(VerifyArgs& a) {
  struct Row {
    double param, energy, closed, err;
  };
  std::vector<Row> rows;
  auto push = [&](double param, double energy, double closed) {
    rows.push_back({param, energy, closed, std::abs(energy - closed)});
  };
  const auto w_bobenko = [](const willmin::TriMesh& m) {
    return willmin::w_pl(m, willmin::WVariant::Bobenko).value;
  };

  if (a.id == "bobenko-spherical") {
    const int m = a.m > 0 ? a.m : 10, n = a.n > 0 ? a.n : 20;
    if (a.eps.empty()) a.eps = {0.3, 0.1, 0.03, 0.01, 0.003};
    for (const double eps : a.eps)
      push(eps, w_bobenko(willmin::spherical_torus(m, n, eps)),
           willmin::bobenko_spherical_closed_form(n, eps));
  } else if (a.id == "bobenko-planar") {
    if (!a.ratios.empty()) {
      const int m = a.m > 0 ? a.m : 3, n = a.n > 0 ? a.n : 8;
      for (const double t : a.ratios) {
        std::vector<double> radii(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
          radii[static_cast<std::size_t>(i)] = std::pow(t, double(i) / double(m - 1));
        push(t, w_bobenko(willmin::planar_torus(m, n, radii)),
             willmin::bobenko_planar_closed_form(n, t));
      }
    } else {
      // Random (m, n, ratio) triples; the closed form depends only on n and
      // the outer/inner radius ratio, so intermediate radii are free.
      std::mt19937_64 rng(a.seed);
      std::uniform_int_distribution<int> pick_m(3, 8), pick_n(3, 40);
      std::uniform_real_distribution<double> pick_t(0.05, 0.95);
      for (int k = 0; k < a.count; ++k) {
        const int m = pick_m(rng), n = pick_n(rng);
        const double t = pick_t(rng);
        std::vector<double> radii(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
          radii[static_cast<std::size_t>(i)] = std::pow(t, double(i) / double(m - 1));
        push(t, w_bobenko(willmin::planar_torus(m, n, radii)),
             willmin::bobenko_planar_closed_form(n, t));
      }
    }
  } else if (a.id == "centroid-limit" || a.id == "effarea-limit") {
    const int n = a.n > 0 ? a.n : 8;
    if (a.params.empty()) a.params = {0.3, 0.1, 0.03, 0.01, 0.003, 0.001};
    for (const double p : a.params) {
      if (a.id == "centroid-limit") {
        // Collapse the inner layers: radii (1, r1, r1/10), r1 -> 0.
        const willmin::TriMesh m = willmin::planar_torus(3, n, {1.0, p, p / 10.0});
        push(p, willmin::w_pl(m, willmin::WVariant::Centroid).value,
             willmin::centroid_limit_value(n));
      } else {
        // Push the middle layer out and the inner one in: (1, 1-d, d/10).
        const willmin::TriMesh m = willmin::planar_torus(3, n, {1.0, 1.0 - p, p / 10.0});
        push(p, willmin::w_pl(m, willmin::WVariant::EffArea).value,
             willmin::effarea_limit_value(n));
      }
    }
  } else {
    willmin::throw_input("unknown verify id '" + a.id +
                         "' (expected bobenko-spherical, bobenko-planar, centroid-limit, "
                         "or effarea-limit)");
  }

  std::string csv = "param,energy,closed_form,abs_err\n";
  for (const Row& r : rows)
    csv += willmin::format_g17(r.param) + "," + willmin::format_g17(r.energy) + "," +
           willmin::format_g17(r.closed) + "," + willmin::format_g17(r.err) + "\n";
  emit(csv, a.out);
  return kExitOk;
}

// solve ----------------------------------------------------------------------

struct SolveArgs {
  std::string mesh_path;
  std::string out = "final.obj";
  std::string report = "run_report.json";
  std::string rep = "loop";
  std::string problem = "willmore";
  std::string w_variant = "normalcur";
  std::string m_variant = "cotan";
  double lambda = 0.0;
  StructureFlags structure;
  int quad_grid = 4;
  int ring_depth = 12;
  double a0 = 0.0, v0 = 1.0, m0 = 1.0;
  double mu0 = 10.0, mu_growth = 10.0, mu_max = 1e8;
  double tol_g = 1e-6, tol_c = 1e-6;
  int max_inner = 5000;
  std::string method = "bfgs";
  std::string sym_path;
  unsigned seed = 0;
  double perturb = 0.0;
  bool deterministic = false;
};

willmin::WVariant w_variant_from(const std::string& s) {
  if (s == "centroid") return willmin::WVariant::Centroid;
  if (s == "voronoi") return willmin::WVariant::Voronoi;
  if (s == "effarea") return willmin::WVariant::EffArea;
  if (s == "normalcur") return willmin::WVariant::NormalCur;
  if (s == "bobenko") return willmin::WVariant::Bobenko;
  willmin::throw_input("unknown W variant '" + s + "'");
}

willmin::SymmetrySpec load_symmetry(const std::string& path) {
  std::ifstream in(path);
  if (!in) willmin::throw_input("cannot read " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    willmin::throw_input(path + ": " + e.what());
  }
  willmin::SymmetrySpec sym;
  for (const auto& el : doc.at("elements")) {
    willmin::SymmetryElement se;
    const auto& mat = el.at("matrix");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) se.g.row[static_cast<std::size_t>(i)][j] = mat.at(i).at(j);
    for (const auto& p : el.at("perm")) se.perm.push_back(p.get<willmin::Index>());
    sym.elements.push_back(std::move(se));
  }
  return sym;
}

json spec_to_json(const willmin::ProblemSpec& spec) {
  json j;
  j["rep"] = spec.rep == willmin::Representation::PL ? "pl" : "loop";
  j["problem"] = spec.kind == willmin::ProblemKind::Willmore   ? "willmore"
                 : spec.kind == willmin::ProblemKind::Canham   ? "canham"
                                                               : "helfrich";
  if (spec.rep == willmin::Representation::PL) {
    const char* wnames[] = {"centroid", "voronoi", "effarea", "normalcur", "bobenko"};
    j["w_variant"] = wnames[static_cast<int>(spec.pl.w_variant)];
    j["m_variant"] = spec.pl.m_variant == willmin::MVariant::Cotan ? "cotan" : "steiner";
    j["lambda"] = spec.pl.lambda;
    j["structure"] =
        spec.pl.structure.kind == willmin::ConformalStructure::Kind::Equilateral
            ? "equilateral"
            : "lattice";
  } else {
    j["quad_grid"] = spec.loop.quad_grid;
    j["ring_depth"] = spec.loop.ring_depth;
  }
  j["A0"] = spec.A0;
  j["v0"] = spec.v0;
  j["m0"] = spec.m0;
  j["mu0"] = spec.params.mu0;
  j["mu_growth"] = spec.params.mu_growth;
  j["mu_max"] = spec.params.mu_max;
  j["tol_g"] = spec.params.tol_g;
  j["tol_c"] = spec.params.tol_c;
  j["max_inner"] = spec.params.max_inner;
  j["method"] =
      spec.params.method == willmin::DescentMethod::BFGS ? "bfgs" : "gradient-descent";
  j["deterministic"] = spec.params.deterministic;
  return j;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int run_solve(SolveArgs& a) {
  const std::string mesh_hash = file_hash(a.mesh_path);
  willmin::TriMesh mesh = willmin::read_mesh(a.mesh_path);

  if (a.perturb > 0.0) {
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> u(-a.perturb, a.perturb);
    for (willmin::Vec3& p : mesh.vertices) p = p * (1.0 + u(rng));
  }

  willmin::ProblemSpec spec;
  spec.rep = a.rep == "pl" ? willmin::Representation::PL : willmin::Representation::Loop;
  spec.kind = a.problem == "willmore" ? willmin::ProblemKind::Willmore
              : a.problem == "canham" ? willmin::ProblemKind::Canham
                                      : willmin::ProblemKind::Helfrich;
  spec.pl.w_variant = w_variant_from(a.w_variant);
  spec.pl.m_variant =
      a.m_variant == "steiner" ? willmin::MVariant::Steiner : willmin::MVariant::Cotan;
  spec.pl.lambda = a.lambda;
  spec.pl.structure = a.structure.resolve();
  spec.loop.quad_grid = a.quad_grid;
  spec.loop.ring_depth = a.ring_depth;
  spec.A0 = a.a0;
  spec.v0 = a.v0;
  spec.m0 = a.m0;
  spec.params.mu0 = a.mu0;
  spec.params.mu_growth = a.mu_growth;
  spec.params.mu_max = a.mu_max;
  spec.params.tol_g = a.tol_g;
  spec.params.tol_c = a.tol_c;
  spec.params.max_inner = a.max_inner;
  spec.params.method = a.method == "gd" ? willmin::DescentMethod::GradientDescent
                                        : willmin::DescentMethod::BFGS;
  spec.params.deterministic = a.deterministic;

  std::optional<willmin::SymmetrySpec> sym;
  std::string sym_hash;
  if (!a.sym_path.empty()) {
    sym_hash = file_hash(a.sym_path);
    sym = load_symmetry(a.sym_path);
  }

  json report;
  report["schema"] = "willmin-run-report/1";
  report["version"] = kVersion;
  report["input"] = json{{"mesh", a.mesh_path},
                         {"mesh_hash", mesh_hash},
                         {"sym", a.sym_path.empty() ? json(nullptr) : json(a.sym_path)},
                         {"sym_hash", sym_hash.empty() ? json(nullptr) : json(sym_hash)},
                         {"seed", a.seed},
                         {"perturb", a.perturb}};
  report["spec"] = spec_to_json(spec);

  const auto t0 = std::chrono::steady_clock::now();
  willmin::OptimResult res;
  try {
    res = willmin::minimize(mesh, spec, sym ? &*sym : nullptr);
  } catch (const willmin::Error& e) {
    report["error"] = e.what();
    write_text(a.report, report.dump(2) + "\n");
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

  json history = json::array();
  for (const willmin::IterationRecord& r : res.history) {
    double v0 = std::numeric_limits<double>::quiet_NaN(), m0 = v0;
    if (r.A > 0.0) {
      const auto red = willmin::reduced_quantities(r.A, r.V, r.M);
      v0 = red.first;
      m0 = red.second;
    }
    history.push_back(json{{"iteration", r.iteration},
                           {"F", finite_or_null(r.F)},
                           {"W", finite_or_null(r.W)},
                           {"A", finite_or_null(r.A)},
                           {"V", finite_or_null(r.V)},
                           {"M", finite_or_null(r.M)},
                           {"v0", finite_or_null(v0)},
                           {"m0", finite_or_null(m0)},
                           {"grad_inf", finite_or_null(r.grad_inf)},
                           {"mu", r.mu},
                           {"violation", finite_or_null(r.violation)}});
  }
  report["history"] = std::move(history);
  report["final"] = json{{"reason", willmin::to_string(res.reason)},
                         {"feasible", res.feasible},
                         {"W", finite_or_null(res.W)},
                         {"A", finite_or_null(res.A)},
                         {"V", finite_or_null(res.V)},
                         {"M", finite_or_null(res.M)},
                         {"v0", finite_or_null(res.v0)},
                         {"m0", finite_or_null(res.m0)},
                         {"symmetry_deviation",
                          sym ? json(res.symmetry_deviation) : json(nullptr)},
                         {"iterations", res.history.back().iteration},
                         {"evaluations", res.evaluations}};
  report["timing"] =
      json{{"total_seconds", a.deterministic ? 0.0 : seconds}};

  willmin::write_mesh(res.mesh, a.out);
  write_text(a.report, report.dump(2) + "\n");

  std::cout << "reason=" << willmin::to_string(res.reason)
            << " feasible=" << (res.feasible ? 1 : 0) << " W=" << res.W << " A=" << res.A
            << " V=" << res.V << " M=" << res.M << " v0=" << res.v0 << " m0=" << res.m0
            << " iterations=" << res.history.back().iteration << "\n";
  return res.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Willmore, Canham, and Helfrich energies on triangle meshes: PL and "
               "Loop-subdivision discretizations, constrained flows, and verification "
               "sweeps"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Config file with key=value lines ([subcommand] sections)");
  app.set_version_flag("--version", kVersion);

  // mesh gen
  CLI::App* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
  mesh_cmd->require_subcommand(1);
  CLI::App* gen = mesh_cmd->add_subcommand("gen", "Generate a structured mesh");
  gen->require_subcommand(1);
  GenArgs ga;
  CLI::App* sph = gen->add_subcommand("sph-torus", "Sphere-inscribed torus grid");
  sph->add_option("--m", ga.m, "Latitude layers")->required();
  sph->add_option("--n", ga.n, "Longitude count")->required();
  sph->add_option("--eps", ga.eps, "Polar angle margin")->required();
  CLI::App* plan = gen->add_subcommand("plan-torus", "Planar concentric torus grid");
  plan->add_option("--m", ga.m, "Layer count")->required();
  plan->add_option("--n", ga.n, "Points per layer")->required();
  plan->add_option("--radii", ga.radii, "Strictly decreasing layer radii (m values)")
      ->required()
      ->expected(-1);
  CLI::App* sphr = gen->add_subcommand("sphere", "Subdivided platonic solid");
  sphr->add_option("--kind", ga.kind, "octahedron|icosahedron|tetrahedron")
      ->check(CLI::IsMember({"octahedron", "icosahedron", "tetrahedron"}));
  sphr->add_option("--levels", ga.levels, "Midpoint subdivision levels");
  sphr->add_flag("--project", ga.project, "Project vertices to the unit sphere");
  sphr->add_option("--flatten", ga.flatten, "Scale z by this factor after projection");
  CLI::App* rev = gen->add_subcommand("rev-torus", "Torus of revolution");
  rev->add_option("--m", ga.rev_m, "Major grid count");
  rev->add_option("--n", ga.rev_n, "Minor grid count");
  rev->add_option("--R", ga.big_r, "Major radius");
  rev->add_option("--r", ga.small_r, "Minor radius");
  for (CLI::App* c : {sph, plan, sphr, rev})
    c->add_option("-o,--out", ga.out, "Output mesh file (.obj or .off)");

  // energy
  EnergyArgs ea;
  CLI::App* energy = app.add_subcommand("energy", "Evaluate energies on a mesh file");
  energy->add_option("mesh", ea.mesh_path, "Input mesh (.obj or .off)")->required();
  energy->add_option("-o,--out", ea.out, "Write JSON here instead of stdout");
  energy->add_flag("--a", ea.a, "Surface area");
  energy->add_flag("--v", ea.v, "Enclosed volume");
  energy->add_flag("--m-cotan", ea.m_cotan, "Total mean curvature, cotan vertex scheme");
  energy->add_flag("--m-steiner", ea.m_steiner, "Total mean curvature, Steiner edge scheme");
  energy->add_flag("--w-centroid", ea.w_centroid, "PL Willmore, centroid areas");
  energy->add_flag("--w-voronoi", ea.w_voronoi, "PL Willmore, Voronoi areas");
  energy->add_flag("--w-effarea", ea.w_effarea, "PL Willmore, effective areas");
  energy->add_flag("--w-normalcur", ea.w_normalcur, "PL Willmore, normal-curvature areas");
  energy->add_flag("--w-bobenko", ea.w_bobenko, "Circle-based Willmore energy");
  energy->add_flag("--dirichlet", ea.dirichlet, "Dirichlet energy for --structure");
  energy->add_flag("--ss", ea.ss, "Loop subdivision-surface A, V, M, W");
  energy->add_flag("--reduced", ea.reduced, "Reduced volume v0 and curvature m0");
  energy->add_flag("--all", ea.all, "All PL energies plus Dirichlet and reduced");
  energy->add_flag("--invert", ea.invert, "Apply a sphere inversion before evaluating");
  energy->add_option("--invert-center", ea.invert_center, "Inversion center x,y,z");
  energy->add_option("--invert-radius", ea.invert_radius, "Inversion radius");
  ea.ssf.attach(energy);
  ea.structure.attach(energy);

  // gradcheck
  GradcheckArgs ka;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  gradcheck->add_option("mesh", ka.mesh_path, "Input mesh (.obj or .off)")->required();
  gradcheck->add_option("-o,--out", ka.out, "Write JSON here instead of stdout");
  gradcheck->add_option("--functional", ka.functionals,
                        "a v m-cotan m-steiner w-centroid w-voronoi w-effarea w-normalcur "
                        "w-bobenko dirichlet ss-a ss-v ss-m ss-w (repeatable)");
  gradcheck->add_flag("--all", ka.all, "Check every functional");
  gradcheck->add_option("--samples", ka.samples, "Sampled vertex coordinates per functional");
  gradcheck->add_option("--seed", ka.seed, "Sampling seed");
  gradcheck->add_option("--step", ka.h, "Central-difference step");
  ka.ssf.attach(gradcheck);
  ka.structure.attach(gradcheck);

  // verify
  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "Closed-form verification sweeps (CSV)");
  verify->add_option("id", va.id,
                     "bobenko-spherical | bobenko-planar | centroid-limit | effarea-limit")
      ->required();
  verify->add_option("-o,--out", va.out, "Write CSV here instead of stdout");
  verify->add_option("--m", va.m, "Layer count (family-specific default)");
  verify->add_option("--n", va.n, "Points per layer (family-specific default)");
  verify->add_option("--eps", va.eps, "Polar margins for bobenko-spherical")->expected(-1);
  verify->add_option("--ratios", va.ratios, "Radius ratios for bobenko-planar")->expected(-1);
  verify->add_option("--params", va.params, "Sweep parameters for the limit families")
      ->expected(-1);
  verify->add_option("--count", va.count, "Random sample count for bobenko-planar");
  verify->add_option("--seed", va.seed, "Random sweep seed");

  // solve
  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "Run a constrained minimization");
  solve->add_option("mesh", sa.mesh_path, "Initial mesh (.obj or .off)")->required();
  solve->add_option("-o,--out", sa.out, "Final mesh file");
  solve->add_option("--report", sa.report, "Run report JSON file");
  solve->add_option("--rep", sa.rep, "Energy representation")
      ->check(CLI::IsMember({"pl", "loop"}));
  solve->add_option("--problem", sa.problem, "Constraint set")
      ->check(CLI::IsMember({"willmore", "canham", "helfrich"}));
  solve->add_option("--w-variant", sa.w_variant, "PL Willmore variant")
      ->check(CLI::IsMember({"centroid", "voronoi", "effarea", "normalcur", "bobenko"}));
  solve->add_option("--m-variant", sa.m_variant, "PL total-mean-curvature variant")
      ->check(CLI::IsMember({"cotan", "steiner"}));
  solve->add_option("--lambda", sa.lambda, "Dirichlet regularization weight (PL)");
  sa.structure.attach(solve);
  solve->add_option("--quad-grid", sa.quad_grid, "Loop quadrature grid (power of two)");
  solve->add_option("--ring-depth", sa.ring_depth, "Loop ring depth");
  solve->add_option("--a0", sa.a0, "Target area (default: initial mesh area)");
  solve->add_option("--v0", sa.v0, "Reduced volume target in (0,1]");
  solve->add_option("--m0", sa.m0, "Reduced total-mean-curvature target");
  solve->add_option("--mu0", sa.mu0, "Initial penalty weight");
  solve->add_option("--mu-growth", sa.mu_growth, "Penalty growth factor");
  solve->add_option("--mu-max", sa.mu_max, "Penalty weight cap");
  solve->add_option("--tol-g", sa.tol_g, "Gradient tolerance");
  solve->add_option("--tol-c", sa.tol_c, "Constraint violation tolerance");
  solve->add_option("--max-inner", sa.max_inner, "Iteration cap per penalty stage");
  solve->add_option("--method", sa.method, "Descent method")
      ->check(CLI::IsMember({"bfgs", "gd"}));
  solve->add_option("--sym", sa.sym_path, "Symmetry spec JSON (elements: matrix, perm)");
  solve->add_option("--seed", sa.seed, "Seed for --perturb");
  solve->add_option("--perturb", sa.perturb, "Relative initial vertex jitter");
  solve->add_flag("--deterministic", sa.deterministic,
                  "Zero wall-clock timing so reports are byte-reproducible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (app.got_subcommand(mesh_cmd)) {
      for (const char* name : {"sph-torus", "plan-torus", "sphere", "rev-torus"})
        if (gen->got_subcommand(name)) return run_gen(name, ga);
    }
    if (app.got_subcommand(energy)) return run_energy(ea);
    if (app.got_subcommand(gradcheck)) return run_gradcheck(ka);
    if (app.got_subcommand(verify)) return run_verify(va);
    if (app.got_subcommand(solve)) return run_solve(sa);
  } catch (const willmin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
