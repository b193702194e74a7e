#pragma once

// Area, enclosed volume, total mean curvature, and Willmore energy of Loop
// subdivision surfaces, with analytic gradients with respect to the control
// vertices. Everything parameter-dependent (basis values and partials at the
// quadrature nodes, per valence) is precomputed into tables; per-patch work
// is then dense linear algebra on the gathered control data. Per-face
// results are reduced serially in face order, so values and gradients do not
// depend on the thread count.

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "willmin/common.hpp"
#include "willmin/loop.hpp"
#include "willmin/mesh.hpp"
#include "willmin/quadrature.hpp"

namespace willmin {

// Functional selection bitmask.
inline constexpr unsigned kFnA = 1u << 0;
inline constexpr unsigned kFnV = 1u << 1;
inline constexpr unsigned kFnM = 1u << 2;
inline constexpr unsigned kFnW = 1u << 3;
inline constexpr unsigned kFnAll = kFnA | kFnV | kFnM | kFnW;

// Default composite grid and ring depth; coarse control meshes warrant n = 8,
// refined ones integrate accurately with n = 1 or 2.
inline constexpr int kDefaultQuadGrid = 8;
inline constexpr int kDefaultRingDepth = 16;

// ---------------------------------------------------------------------------
// Precomputed basis tables.

// Basis values and partials at every quadrature node for one valence.
// valence 6 means a regular patch (12 columns); otherwise columns = N + 6.
// Derivative rows include the chain factors of the irregular parameter maps,
// so consumers only ever form row * controls.
struct ValenceTable {
  int valence = 6;
  Eigen::VectorXd weights;
  Eigen::VectorXd pv, pw;                // node positions in Omega (diagnostics)
  std::array<Eigen::MatrixXd, 6> basis;  // b, b_v, b_w, b_vv, b_vw, b_ww
};

struct QuadBasisTable {
  int n = 0, D = 0;
  std::map<int, ValenceTable> tables;  // keyed by valence, 6 = regular
};

inline ValenceTable make_valence_table(int valence, const QuadRule& rule) {
  ValenceTable t;
  t.valence = valence;
  if (valence == 6) {
    const Eigen::Index m = static_cast<Eigen::Index>(rule.regular.size());
    t.weights.resize(m);
    t.pv.resize(m);
    t.pw.resize(m);
    for (auto& mat : t.basis) mat.resize(m, 12);
    for (Eigen::Index i = 0; i < m; ++i) {
      const QuadNode& q = rule.regular[static_cast<std::size_t>(i)];
      t.weights(i) = q.weight;
      t.pv(i) = q.v;
      t.pw(i) = q.w;
      const LoopBasis bas = regular_basis(q.v, q.w, 2);
      for (int j = 0; j < 12; ++j) {
        const std::size_t s = static_cast<std::size_t>(j);
        t.basis[0](i, j) = bas.b[s];
        t.basis[1](i, j) = bas.bv[s];
        t.basis[2](i, j) = bas.bw[s];
        t.basis[3](i, j) = bas.bvv[s];
        t.basis[4](i, j) = bas.bvw[s];
        t.basis[5](i, j) = bas.bww[s];
      }
    }
    return t;
  }

  const EigenStructure& es = shared_eigenstructure(valence);
  const Eigen::Index K = es.Vinv.rows();
  const Eigen::Index m = static_cast<Eigen::Index>(rule.rings.size());
  t.weights.resize(m);
  t.pv.resize(m);
  t.pw.resize(m);
  for (auto& mat : t.basis) mat.resize(m, K);

  // A node's row is b~^T MkV Lambda^(depth-1) Vinv times the chain factor.
  // The coefficient of the constant eigenmode is the basis sum: exactly 1 for
  // values and exactly 0 for derivatives. Snapping it kills the 4^depth
  // amplification of its roundoff residual at deep rings.
  for (Eigen::Index i = 0; i < m; ++i) {
    const RingQuadNode& q = rule.rings[static_cast<std::size_t>(i)];
    t.weights(i) = q.weight;
    ring_node_param(q, t.pv(i), t.pw(i));
    const double sign = q.subpatch == 1 ? -1.0 : 1.0;
    const double f1 = sign * std::exp2(static_cast<double>(q.depth));
    const double f2 = f1 * f1;
    const LoopBasis bas = regular_basis(q.tv, q.tw, 2);
    const Eigen::MatrixXd& MkVk = es.MkV[static_cast<std::size_t>(q.subpatch)];
    Eigen::VectorXd b12(12), u(K);
    auto emit = [&](int slot, const std::array<double, 12>& b, double factor) {
      for (int j = 0; j < 12; ++j) b12(j) = b[static_cast<std::size_t>(j)];
      u.noalias() = MkVk.transpose() * b12;
      u(0) = slot == 0 ? 1.0 : 0.0;
      double jordan_carry = 0.0;
      if (es.jordan_p >= 0 && q.depth >= 2)
        jordan_carry =
            u(es.jordan_p) * (q.depth - 1) * std::pow(es.eigenvalues(es.jordan_p), q.depth - 2);
      for (Eigen::Index r = 0; r < K; ++r) u(r) *= std::pow(es.eigenvalues(r), q.depth - 1);
      if (es.jordan_q >= 0) u(es.jordan_q) += jordan_carry;
      t.basis[static_cast<std::size_t>(slot)].row(i) = factor * (u.transpose() * es.Vinv);
    };
    emit(0, bas.b, 1.0);
    emit(1, bas.bv, f1);
    emit(2, bas.bw, f1);
    emit(3, bas.bvv, f2);
    emit(4, bas.bvw, f2);
    emit(5, bas.bww, f2);
  }
  return t;
}

// Tables for exactly the valences present in the patch list.
inline QuadBasisTable build_basis_tables(const PatchTables& patches, const QuadRule& rule) {
  QuadBasisTable qt;
  qt.n = rule.n;
  qt.D = rule.D;
  for (const PatchInfo& info : patches.patches) {
    const int key = info.regular ? 6 : static_cast<int>(info.valence);
    if (!qt.tables.count(key)) qt.tables.emplace(key, make_valence_table(key, rule));
  }
  return qt;
}

inline const ValenceTable& valence_table(const QuadBasisTable& qt, const PatchInfo& info) {
  const int key = info.regular ? 6 : static_cast<int>(info.valence);
  const auto it = qt.tables.find(key);
  if (it == qt.tables.end())
    throw_input("valence_table: no table for valence " + std::to_string(key) +
                "; rebuild the basis tables for this mesh");
  return it->second;
}

// ---------------------------------------------------------------------------
// Fundamental forms.

// First and (unnormalized) second fundamental forms at one parameter point.
// n is the unnormalized normal s_v x s_w, so |n|^2 = EG - F^2, and
// Hbar = H |n| integrates M and W without ever normalizing n.
struct FundamentalForms {
  double E = 0, F = 0, G = 0;
  double ebar = 0, fbar = 0, gbar = 0;  // <s_vv, n>, <s_vw, n>, <s_ww, n>
  Vec3 n{};
  double Hbar = 0;  // (ebar G - 2 fbar F + gbar E) / (2 (EG - F^2))

  double det() const { return E * G - F * F; }
};

inline FundamentalForms fundamental_forms(const Vec3& sv, const Vec3& sw, const Vec3& svv,
                                          const Vec3& svw, const Vec3& sww) {
  FundamentalForms ff;
  ff.E = dot(sv, sv);
  ff.F = dot(sv, sw);
  ff.G = dot(sw, sw);
  ff.n = cross(sv, sw);
  ff.ebar = dot(svv, ff.n);
  ff.fbar = dot(svw, ff.n);
  ff.gbar = dot(sww, ff.n);
  ff.Hbar = (ff.ebar * ff.G - 2.0 * ff.fbar * ff.F + ff.gbar * ff.E) / (2.0 * ff.det());
  return ff;
}

// ---------------------------------------------------------------------------
// Per-patch functionals and gradients.

struct PatchValues {
  double A = 0, V = 0, M = 0, W = 0;
};

struct PatchGradients {
  ControlMatrix A, V, M, W;  // sized (controls x 3) for the requested functionals
};

namespace detail {

[[noreturn]] inline void throw_not_immersed(Index face, Eigen::Index node, double v, double w) {
  const std::string where =
      face >= 0 ? "face " + std::to_string(face) : std::string("standalone patch");
  throw_numerical("patch not immersed (EG - F^2 <= 0) at " + where + ", quadrature node " +
                  std::to_string(node) + ", parameter (" + format_g17(v) + ", " + format_g17(w) +
                  ")");
}

// Values and optionally gradients of the selected functionals for one patch.
// Gradients are assembled per node from coefficients over the six basis rows:
// every d/dc_f quantity in the chain rule is a combination of b, b_v, b_w,
// b_vv, b_vw, b_ww per coordinate column, so each functional costs one
// (K x 6) x (6 x 3) update per node.
inline void patch_kernel(const ControlMatrix& c, const ValenceTable& t, unsigned which,
                         PatchValues* vals, PatchGradients* grads, Index face) {
  const Eigen::Index K = c.rows();
  const Eigen::Index expected = t.valence == 6 ? 12 : t.valence + 6;
  if (K != expected)
    throw_input("patch_kernel: control rows " + std::to_string(K) + " do not match valence " +
                std::to_string(t.valence));

  const bool needA = which & kFnA, needV = which & kFnV;
  const bool needM = which & kFnM, needW = which & kFnW;
  const bool need2 = needM || needW;

  Eigen::MatrixXd S0, Sv, Sw, Svv, Svw, Sww;
  Sv.noalias() = t.basis[1] * c;
  Sw.noalias() = t.basis[2] * c;
  if (needV) S0.noalias() = t.basis[0] * c;
  if (need2) {
    Svv.noalias() = t.basis[3] * c;
    Svw.noalias() = t.basis[4] * c;
    Sww.noalias() = t.basis[5] * c;
  }

  if (grads) {
    if (needA) grads->A = ControlMatrix::Zero(K, 3);
    if (needV) grads->V = ControlMatrix::Zero(K, 3);
    if (needM) grads->M = ControlMatrix::Zero(K, 3);
    if (needW) grads->W = ControlMatrix::Zero(K, 3);
  }

  using Coef = Eigen::Matrix<double, 6, 3>;  // rows: basis slot, cols: coordinate
  Eigen::MatrixXd B(K, 6);
  const int bcols = need2 ? 6 : 3;
  if (!need2 && grads) B.rightCols(3).setZero();

  double accA = 0, accV = 0, accM = 0, accW = 0;
  const Eigen::Index nodes = t.weights.size();
  for (Eigen::Index i = 0; i < nodes; ++i) {
    const double om = t.weights(i);
    const Vec3 sv{Sv(i, 0), Sv(i, 1), Sv(i, 2)};
    const Vec3 sw{Sw(i, 0), Sw(i, 1), Sw(i, 2)};
    const Vec3 n = cross(sv, sw);
    const double nn = dot(n, n);
    if (!(nn > 0.0)) throw_not_immersed(face, i, t.pv(i), t.pw(i));
    const double nrm = std::sqrt(nn);

    Vec3 s{}, svv{}, svw{}, sww{};
    if (needV) s = Vec3{S0(i, 0), S0(i, 1), S0(i, 2)};
    double Hbar = 0, E = 0, F = 0, G = 0, ebar = 0, fbar = 0, gbar = 0;
    if (need2) {
      svv = Vec3{Svv(i, 0), Svv(i, 1), Svv(i, 2)};
      svw = Vec3{Svw(i, 0), Svw(i, 1), Svw(i, 2)};
      sww = Vec3{Sww(i, 0), Sww(i, 1), Sww(i, 2)};
      E = dot(sv, sv);
      F = dot(sv, sw);
      G = dot(sw, sw);
      ebar = dot(svv, n);
      fbar = dot(svw, n);
      gbar = dot(sww, n);
      Hbar = (ebar * G - 2.0 * fbar * F + gbar * E) / (2.0 * nn);
    }

    if (needA) accA += om * nrm;
    if (needV) accV += om * dot(s, n) / 3.0;
    if (needM) accM -= om * Hbar;
    if (needW) accW += om * Hbar * Hbar / nrm;

    if (!grads) continue;

    for (int b = 0; b < bcols; ++b)
      B.col(b) = t.basis[static_cast<std::size_t>(b)].row(i).transpose();

    // Gradients of the normal components; column j holds the coefficients of
    // d n_j / d c_f over the basis rows.
    Coef Cn1 = Coef::Zero(), Cn2 = Coef::Zero(), Cn3 = Coef::Zero();
    Cn1(1, 1) = sw[2];
    Cn1(2, 1) = -sv[2];
    Cn1(2, 2) = sv[1];
    Cn1(1, 2) = -sw[1];
    Cn2(1, 0) = -sw[2];
    Cn2(2, 0) = sv[2];
    Cn2(1, 2) = sw[0];
    Cn2(2, 2) = -sv[0];
    Cn3(1, 0) = sw[1];
    Cn3(2, 0) = -sv[1];
    Cn3(2, 1) = sv[0];
    Cn3(1, 1) = -sw[0];

    const Coef CnormN = (n[0] * Cn1 + n[1] * Cn2 + n[2] * Cn3) / nrm;

    if (needA) grads->A.noalias() += B * (om * CnormN);

    if (needV) {
      Coef CV = s[0] * Cn1 + s[1] * Cn2 + s[2] * Cn3;
      CV(0, 0) += n[0];
      CV(0, 1) += n[1];
      CV(0, 2) += n[2];
      grads->V.noalias() += B * ((om / 3.0) * CV);
    }

    if (need2) {
      Coef CE = Coef::Zero(), CF = Coef::Zero(), CG = Coef::Zero();
      for (int j = 0; j < 3; ++j) {
        CE(1, j) = 2.0 * sv[j];
        CF(1, j) = sw[j];
        CF(2, j) = sv[j];
        CG(2, j) = 2.0 * sw[j];
      }
      Coef Ce = svv[0] * Cn1 + svv[1] * Cn2 + svv[2] * Cn3;
      Coef Cf = svw[0] * Cn1 + svw[1] * Cn2 + svw[2] * Cn3;
      Coef Cg = sww[0] * Cn1 + sww[1] * Cn2 + sww[2] * Cn3;
      for (int j = 0; j < 3; ++j) {
        Ce(3, j) += n[j];
        Cf(4, j) += n[j];
        Cg(5, j) += n[j];
      }
      const Coef CT = G * Ce + ebar * CG - 2.0 * (F * Cf + fbar * CF) + E * Cg + gbar * CE;
      const Coef CD = G * CE + E * CG - 2.0 * F * CF;
      const Coef CH = CT / (2.0 * nn) - (Hbar / nn) * CD;
      if (needM) grads->M.noalias() -= B * (om * CH);
      if (needW)
        grads->W.noalias() +=
            B * (om * (2.0 * Hbar / nrm) * CH - om * (Hbar * Hbar / nn) * CnormN);
    }
  }

  if (vals) {
    vals->A = accA;
    vals->V = accV;
    vals->M = accM;
    vals->W = accW;
  }
}

}  // namespace detail

inline PatchValues patch_functionals(const ControlMatrix& c, const ValenceTable& t,
                                     unsigned which, Index face = -1) {
  PatchValues vals;
  detail::patch_kernel(c, t, which, &vals, nullptr, face);
  return vals;
}

inline PatchGradients patch_gradients(const ControlMatrix& c, const ValenceTable& t,
                                      unsigned which, Index face = -1) {
  PatchGradients grads;
  detail::patch_kernel(c, t, which, nullptr, &grads, face);
  return grads;
}

// ---------------------------------------------------------------------------
// Whole-mesh functionals.

struct SsEnergies {
  double A = 0, V = 0, M = 0, W = 0;
  VertexVectorField grad_A, grad_V, grad_M, grad_W;  // sized #V when requested
};

// Sums the per-patch functionals over the mesh and scatters local gradients
// through each face's control list. Patches are processed in parallel into
// per-face slots; sums and scatters run serially in face order.
inline SsEnergies ss_energy(const TriMesh& mesh, const PatchTables& patches,
                            const QuadBasisTable& qt, unsigned which, bool with_gradients) {
  const Index nf = mesh.face_count();
  if (patches.patches.size() != static_cast<std::size_t>(nf))
    throw_input("ss_energy: patch tables do not match the mesh");

  std::vector<PatchValues> vals(static_cast<std::size_t>(nf));
  std::vector<PatchGradients> grads;
  if (with_gradients) grads.resize(static_cast<std::size_t>(nf));

  parallel_for(nf, [&](std::int64_t f) {
    const std::size_t sf = static_cast<std::size_t>(f);
    const PatchInfo& info = patches.patches[sf];
    const ValenceTable& t = valence_table(qt, info);
    const ControlMatrix c = gather_controls(mesh, info);
    detail::patch_kernel(c, t, which, &vals[sf], with_gradients ? &grads[sf] : nullptr,
                         static_cast<Index>(f));
  });

  SsEnergies out;
  std::vector<double> col(static_cast<std::size_t>(nf));
  auto reduce = [&](double PatchValues::*member) {
    for (std::size_t f = 0; f < vals.size(); ++f) col[f] = vals[f].*member;
    return pairwise_sum(col);
  };
  if (which & kFnA) out.A = reduce(&PatchValues::A);
  if (which & kFnV) out.V = reduce(&PatchValues::V);
  if (which & kFnM) out.M = reduce(&PatchValues::M);
  if (which & kFnW) out.W = reduce(&PatchValues::W);

  if (with_gradients) {
    const std::size_t nv = mesh.vertices.size();
    auto scatter = [&](ControlMatrix PatchGradients::*member, VertexVectorField& g) {
      g.assign(nv, Vec3{0.0, 0.0, 0.0});
      for (std::size_t f = 0; f < grads.size(); ++f) {
        const ControlMatrix& local = grads[f].*member;
        const std::vector<Index>& vfl = patches.patches[f].vfl;
        for (std::size_t i = 0; i < vfl.size(); ++i) {
          Vec3& row = g[static_cast<std::size_t>(vfl[i])];
          row[0] += local(static_cast<Eigen::Index>(i), 0);
          row[1] += local(static_cast<Eigen::Index>(i), 1);
          row[2] += local(static_cast<Eigen::Index>(i), 2);
        }
      }
    };
    if (which & kFnA) scatter(&PatchGradients::A, out.grad_A);
    if (which & kFnV) scatter(&PatchGradients::V, out.grad_V);
    if (which & kFnM) scatter(&PatchGradients::M, out.grad_M);
    if (which & kFnW) scatter(&PatchGradients::W, out.grad_W);
  }
  return out;
}

// Total Gaussian curvature of the limit surface; approaches 2 pi chi(mesh)
// by Gauss-Bonnet, which makes it a useful table/evaluation cross-check.
inline double ss_gauss_bonnet(const TriMesh& mesh, const PatchTables& patches,
                              const QuadBasisTable& qt) {
  const Index nf = mesh.face_count();
  if (patches.patches.size() != static_cast<std::size_t>(nf))
    throw_input("ss_gauss_bonnet: patch tables do not match the mesh");
  std::vector<double> per_face(static_cast<std::size_t>(nf), 0.0);
  parallel_for(nf, [&](std::int64_t f) {
    const std::size_t sf = static_cast<std::size_t>(f);
    const PatchInfo& info = patches.patches[sf];
    const ValenceTable& t = valence_table(qt, info);
    const ControlMatrix c = gather_controls(mesh, info);
    Eigen::MatrixXd Sv = t.basis[1] * c, Sw = t.basis[2] * c;
    Eigen::MatrixXd Svv = t.basis[3] * c, Svw = t.basis[4] * c, Sww = t.basis[5] * c;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.weights.size(); ++i) {
      const Vec3 sv{Sv(i, 0), Sv(i, 1), Sv(i, 2)};
      const Vec3 sw{Sw(i, 0), Sw(i, 1), Sw(i, 2)};
      const Vec3 n = cross(sv, sw);
      const double nn = dot(n, n);
      if (!(nn > 0.0)) detail::throw_not_immersed(static_cast<Index>(f), i, t.pv(i), t.pw(i));
      const Vec3 svv{Svv(i, 0), Svv(i, 1), Svv(i, 2)};
      const Vec3 svw{Svw(i, 0), Svw(i, 1), Svw(i, 2)};
      const Vec3 sww{Sww(i, 0), Sww(i, 1), Sww(i, 2)};
      // K dA = (ebar gbar - fbar^2) / |n|^3 dv dw
      acc += t.weights(i) * (dot(svv, n) * dot(sww, n) - sqr(dot(svw, n))) / (nn * std::sqrt(nn));
    }
    per_face[sf] = acc;
  });
  return pairwise_sum(per_face);
}

// ---------------------------------------------------------------------------
// Binary cache for basis tables, keyed by (valence set, n, D).

namespace detail {

inline constexpr std::uint32_t kTableMagic = 0x42514D57u;  // "WMQB"
inline constexpr std::uint32_t kTableVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return static_cast<bool>(is);
}

inline void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  write_pod(os, static_cast<std::int64_t>(m.rows()));
  write_pod(os, static_cast<std::int64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_pod(os, m(r, c));
}

inline bool read_matrix(std::istream& is, Eigen::MatrixXd& m) {
  std::int64_t rows = 0, cols = 0;
  if (!read_pod(is, rows) || !read_pod(is, cols)) return false;
  if (rows < 0 || cols < 0 || rows > (1 << 28) || cols > (1 << 16)) return false;
  m.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!read_pod(is, m(r, c))) return false;
  return true;
}

}  // namespace detail

inline bool save_basis_tables(const std::string& path, const QuadBasisTable& qt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) return false;
  detail::write_pod(os, detail::kTableMagic);
  detail::write_pod(os, detail::kTableVersion);
  detail::write_pod(os, static_cast<std::int32_t>(qt.n));
  detail::write_pod(os, static_cast<std::int32_t>(qt.D));
  detail::write_pod(os, static_cast<std::uint32_t>(qt.tables.size()));
  for (const auto& [valence, t] : qt.tables) {
    detail::write_pod(os, static_cast<std::int32_t>(valence));
    detail::write_matrix(os, Eigen::MatrixXd(t.weights));
    detail::write_matrix(os, Eigen::MatrixXd(t.pv));
    detail::write_matrix(os, Eigen::MatrixXd(t.pw));
    for (const auto& mat : t.basis) detail::write_matrix(os, mat);
  }
  return static_cast<bool>(os);
}

// Returns the cached tables only when the stored key (valence set, n, D)
// matches the request exactly; any mismatch or read failure yields nullopt.
inline std::optional<QuadBasisTable> load_basis_tables(const std::string& path, int n, int D,
                                                       std::vector<int> valences) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint32_t magic = 0, version = 0, count = 0;
  std::int32_t fn = 0, fD = 0;
  if (!detail::read_pod(is, magic) || magic != detail::kTableMagic) return std::nullopt;
  if (!detail::read_pod(is, version) || version != detail::kTableVersion) return std::nullopt;
  if (!detail::read_pod(is, fn) || !detail::read_pod(is, fD)) return std::nullopt;
  if (fn != n || fD != D) return std::nullopt;
  if (!detail::read_pod(is, count)) return std::nullopt;

  std::sort(valences.begin(), valences.end());
  valences.erase(std::unique(valences.begin(), valences.end()), valences.end());
  if (count != valences.size()) return std::nullopt;

  QuadBasisTable qt;
  qt.n = n;
  qt.D = D;
  for (std::uint32_t k = 0; k < count; ++k) {
    std::int32_t valence = 0;
    if (!detail::read_pod(is, valence)) return std::nullopt;
    ValenceTable t;
    t.valence = valence;
    Eigen::MatrixXd col;
    if (!detail::read_matrix(is, col) || col.cols() != 1) return std::nullopt;
    t.weights = col.col(0);
    if (!detail::read_matrix(is, col) || col.cols() != 1) return std::nullopt;
    t.pv = col.col(0);
    if (!detail::read_matrix(is, col) || col.cols() != 1) return std::nullopt;
    t.pw = col.col(0);
    for (auto& mat : t.basis) {
      if (!detail::read_matrix(is, mat) || mat.rows() != t.weights.size()) return std::nullopt;
    }
    qt.tables.emplace(valence, std::move(t));
  }
  std::vector<int> stored;
  stored.reserve(qt.tables.size());
  for (const auto& [valence, t] : qt.tables) stored.push_back(valence);
  if (stored != valences) return std::nullopt;
  return qt;
}

}  // namespace willmin
