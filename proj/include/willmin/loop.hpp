#pragma once

// Loop subdivision: one geometric refinement step, exact evaluation of
// regular patches through the quartic box-spline basis, and exact evaluation
// of irregular patches through the eigenstructure of the extended subdivision
// matrix (Stam's method). Evaluation is pure; EigenStructure and PatchTables
// are immutable once built and safe to share across threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "willmin/common.hpp"
#include "willmin/mesh.hpp"

namespace willmin {

// beta(k) = (5/8 - (3/8 + cos(2 pi/k)/4)^2)/k; beta(6) = 1/16, beta(3) = 3/16.
inline double loop_beta(int k) {
  const double s = 3.0 / 8.0 + std::cos(2.0 * kPi / k) / 4.0;
  return (5.0 / 8.0 - s * s) / k;
}

// One Loop step. Connectivity matches midpoint_subdivide exactly: the vertex
// for edge id e is V + e and face f's children are emitted as
// (v0,m01,m20), (v1,m12,m01), (v2,m20,m12), (m01,m12,m20) at ids 4f..4f+3.
inline TriMesh loop_subdivide(const TriMesh& mesh) {
  const EdgeTable table = build_edge_table(mesh);
  const std::vector<OneRing> rings = all_one_rings(mesh);
  const Index nv = mesh.vertex_count();

  TriMesh out;
  out.vertices.resize(static_cast<std::size_t>(nv) + table.edges.size());
  for (Index v = 0; v < nv; ++v) {
    const OneRing& ring = rings[static_cast<std::size_t>(v)];
    const int k = ring.valence();
    const double beta = loop_beta(k);
    Vec3 acc = mesh.vertices[static_cast<std::size_t>(v)] * (1.0 - k * beta);
    for (Index u : ring.neighbors) acc += mesh.vertices[static_cast<std::size_t>(u)] * beta;
    out.vertices[static_cast<std::size_t>(v)] = acc;
  }
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    const Edge& ed = table.edges[e];
    out.vertices[static_cast<std::size_t>(nv) + e] =
        (mesh.vertices[static_cast<std::size_t>(ed.a)] +
         mesh.vertices[static_cast<std::size_t>(ed.b)]) * (3.0 / 8.0) +
        (mesh.vertices[static_cast<std::size_t>(ed.opposite_ab)] +
         mesh.vertices[static_cast<std::size_t>(ed.opposite_ba)]) * (1.0 / 8.0);
  }

  out.faces.reserve(static_cast<std::size_t>(mesh.face_count()) * 4);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[static_cast<std::size_t>(f)];
    const auto& fe = table.face_edges[static_cast<std::size_t>(f)];
    const Index m12 = nv + fe[0];
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
// Regular patch basis: the twelve quartic pieces of the M_222 box spline on
// one triangle of the three-direction grid, in the standard published order.
// Basis i is attached to grid site kBasisSites[i]; the patch triangle has
// corners at sites (0,0), (1,0), (0,1), which are basis slots 3, 6, 7.

namespace detail {

// Coefficients of 12*b_i over monomials v^a w^c listed in kMonomials order.
inline constexpr std::array<std::array<int, 2>, 15> kMonomials = {{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2},
    {0, 3}, {4, 0}, {3, 1}, {2, 2}, {1, 3}, {0, 4}}};

inline constexpr std::array<std::array<int, 15>, 12> kBoxSplineCoef = {{
    {1, -2, -4, 0, 6, 6, 2, 0, -6, -4, -1, -2, 0, 2, 1},
    {1, -4, -2, 6, 6, 0, -4, -6, 0, 2, 1, 2, 0, -2, -1},
    {1, 2, -2, 0, -6, 0, -4, 0, 6, 2, 2, 4, 0, -2, -1},
    {6, 0, 0, -12, -12, -12, 8, 12, 12, 8, -1, -2, 0, -2, -1},
    {1, -2, 2, 0, -6, 0, 2, 6, 0, -4, -1, -2, 0, 4, 2},
    {0, 0, 0, 0, 0, 0, 2, 0, 0, 0, -1, -2, 0, 0, 0},
    {1, 4, 2, 6, 6, 0, -4, -6, -12, -4, -1, -2, 0, 4, 2},
    {1, 2, 4, 0, 6, 6, -4, -12, -6, -4, 2, 4, 0, -2, -1},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, -2, -1},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 2, 6, 6, 2, -1, -2, 0, -2, -1},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1}}};

}  // namespace detail

inline constexpr std::array<std::array<int, 2>, 12> kBasisSites = {{
    {0, -1}, {-1, 0}, {1, -1}, {0, 0}, {-1, 1}, {2, -1}, {1, 0}, {0, 1},
    {-1, 2}, {2, 0}, {1, 1}, {0, 2}}};

struct LoopBasis {
  std::array<double, 12> b{}, bv{}, bw{};
  std::array<double, 12> bvv{}, bvw{}, bww{};
};

// Values and partials up to `order` (0, 1, or 2) of the twelve basis
// polynomials at (v,w). The domain is v,w >= 0, v + w <= 1; a small slack
// absorbs roundoff from the irregular-patch parameter maps.
inline LoopBasis regular_basis(double v, double w, int order) {
  if (order < 0 || order > 2)
    throw_input("regular_basis: order must be 0, 1, or 2");
  constexpr double slack = 1e-9;
  if (!(v >= -slack && w >= -slack && v + w <= 1.0 + slack))
    throw_numerical("regular_basis: parameter (" + format_g17(v) + ", " + format_g17(w) +
                    ") outside the unit triangle");

  double pv[5] = {1, v, v * v, v * v * v, v * v * v * v};
  double pw[5] = {1, w, w * w, w * w * w, w * w * w * w};
  LoopBasis out;
  for (int i = 0; i < 12; ++i) {
    double s = 0, sv = 0, sw = 0, svv = 0, svw = 0, sww = 0;
    for (int m = 0; m < 15; ++m) {
      const int c = detail::kBoxSplineCoef[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
      if (c == 0) continue;
      const int a = detail::kMonomials[static_cast<std::size_t>(m)][0];
      const int d = detail::kMonomials[static_cast<std::size_t>(m)][1];
      s += c * pv[a] * pw[d];
      if (order >= 1) {
        if (a >= 1) sv += c * a * pv[a - 1] * pw[d];
        if (d >= 1) sw += c * d * pv[a] * pw[d - 1];
      }
      if (order >= 2) {
        if (a >= 2) svv += c * a * (a - 1) * pv[a - 2] * pw[d];
        if (a >= 1 && d >= 1) svw += c * a * d * pv[a - 1] * pw[d - 1];
        if (d >= 2) sww += c * d * (d - 1) * pv[a] * pw[d - 2];
      }
    }
    out.b[static_cast<std::size_t>(i)] = s / 12.0;
    out.bv[static_cast<std::size_t>(i)] = sv / 12.0;
    out.bw[static_cast<std::size_t>(i)] = sw / 12.0;
    out.bvv[static_cast<std::size_t>(i)] = svv / 12.0;
    out.bvw[static_cast<std::size_t>(i)] = svw / 12.0;
    out.bww[static_cast<std::size_t>(i)] = sww / 12.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical irregular patch net. The N+6 coarse controls are ordered
//   0        extraordinary vertex e of valence N
//   1..N     its one-ring r_1..r_N, ccw, with the patch face being (e,r_1,r_2)
//   N+1..N+5 outer controls o_1..o_5 completing the one-level stencil:
//            o_1 beyond a = r_1, o_2 across edge (a,b) with b = r_2,
//            o_3 beyond b, o_4 between a and r_N, o_5 between b and r_3.
// One subdivision step produces N+12 fine controls, ordered
//   0        vertex point of e
//   1..N     edge points m_i of the spokes (e, r_i)
//   N+1..N+11: vertex point a', edge point of (a,b), vertex point b',
//            edge points of (a,r_N), (a,o_4), (a,o_1), (a,o_2),
//            (b,o_2), (b,o_3), (b,o_5), (b,r_3).
// The sub-net around e (slots 0..N, a', e_ab, b', e_aN, e_b3) is again a
// canonical net, which is what makes the scaling law work.

namespace detail {

inline Eigen::MatrixXd loop_extended_matrix(int N) {
  const int K = N + 6;
  Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(N + 12, K);
  const double beta = loop_beta(N);
  ab(0, 0) = 1.0 - N * beta;
  for (int i = 1; i <= N; ++i) ab(0, i) = beta;
  for (int i = 1; i <= N; ++i) {
    const int prev = (i == 1) ? N : i - 1;
    const int next = (i == N) ? 1 : i + 1;
    ab(i, 0) = 3.0 / 8.0;
    ab(i, i) = 3.0 / 8.0;
    ab(i, prev) = 1.0 / 8.0;
    ab(i, next) = 1.0 / 8.0;
  }
  const int o1 = N + 1, o2 = N + 2, o3 = N + 3, o4 = N + 4, o5 = N + 5;
  const int rN = N, r3 = 3;
  auto vertex_row = [&](int row, int center, std::array<int, 6> ring) {
    ab(row, center) = 5.0 / 8.0;
    for (int u : ring) ab(row, u) += 1.0 / 16.0;
  };
  auto edge_row = [&](int row, int p, int q, int wing1, int wing2) {
    ab(row, p) = 3.0 / 8.0;
    ab(row, q) = 3.0 / 8.0;
    ab(row, wing1) += 1.0 / 8.0;
    ab(row, wing2) += 1.0 / 8.0;
  };
  vertex_row(N + 1, 1, {0, rN, o4, o1, o2, 2});
  edge_row(N + 2, 1, 2, 0, o2);
  vertex_row(N + 3, 2, {0, 1, o2, o3, o5, r3});
  edge_row(N + 4, 1, rN, 0, o4);
  edge_row(N + 5, 1, o4, rN, o1);
  edge_row(N + 6, 1, o1, o4, o2);
  edge_row(N + 7, 1, o2, o1, 2);
  edge_row(N + 8, 2, o2, 1, o3);
  edge_row(N + 9, 2, o3, o2, o5);
  edge_row(N + 10, 2, o5, o3, r3);
  edge_row(N + 11, 2, r3, o5, 0);
  return ab;
}

inline Eigen::MatrixXd loop_subdivision_matrix(const Eigen::MatrixXd& abar, int N) {
  const int K = N + 6;
  Eigen::MatrixXd a(K, K);
  a.topRows(N + 5) = abar.topRows(N + 5);
  a.row(K - 1) = abar.row(N + 11);
  return a;
}

// Fine-slot pick lists for the three level-1 regular subpatches, indexed by
// basis slot (kBasisSites order). Subpatch 0 contains corner (1,0), 1 is the
// inverted middle triangle, 2 contains corner (0,1).
inline std::array<std::array<int, 12>, 3> subpatch_picks(int N) {
  return {{{N, 0, N + 4, 1, 2, N + 5, N + 1, N + 2, N + 3, N + 6, N + 7, N + 8},
           {N + 8, N + 7, N + 3, N + 2, N + 1, N + 11, 2, 1, N + 4, 3, 0, N},
           {0, 3, 1, 2, N + 11, N + 1, N + 2, N + 3, N + 10, N + 7, N + 8, N + 9}}};
}

}  // namespace detail

struct EigenStructure {
  int valence = 0;
  Eigen::MatrixXd A;         // (N+6) x (N+6) subdivision matrix of the net
  Eigen::MatrixXd Abar;      // (N+12) x (N+6) extended matrix
  Eigen::MatrixXd V, Vinv;   // generalized eigenvectors of A and inverse
  Eigen::MatrixXd Lambda;    // Jordan form; diagonal except one 2-block at N=3
  Eigen::VectorXd eigenvalues;                // diagonal of Lambda, descending
  int jordan_p = -1, jordan_q = -1;           // Lambda(p,q) = 1, or -1 if none
  std::array<Eigen::MatrixXd, 3> Mk;          // 12 x (N+6) subpatch projectors
  std::array<Eigen::MatrixXd, 3> MkV;         // Mk * V, the evaluation tables
};

// Eigen decomposition of the subdivision matrix for one valence. Eigenvalues
// are known in closed form: 1, 5/8 - N*beta, (3 + 2cos(2 pi j/N))/8 for
// j = 1..N-1, then 1/8 (x3) and 1/16 (x2) from the outer block; eigenvectors
// come from SVD null spaces per eigenvalue cluster, with a generalized pair
// (one Jordan chain) where the geometric multiplicity falls one short.
inline EigenStructure eigenstructure(int N) {
  if (N < 3) throw_input("eigenstructure: valence must be at least 3");
  const int K = N + 6;
  EigenStructure es;
  es.valence = N;
  es.Abar = detail::loop_extended_matrix(N);
  es.A = detail::loop_subdivision_matrix(es.Abar, N);

  std::vector<double> evs = {1.0, 5.0 / 8.0 - N * loop_beta(N)};
  for (int j = 1; j < N; ++j) evs.push_back((3.0 + 2.0 * std::cos(2.0 * kPi * j / N)) / 8.0);
  evs.insert(evs.end(), {1.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 16.0});
  std::sort(evs.begin(), evs.end(), std::greater<double>());

  es.V = Eigen::MatrixXd::Zero(K, K);
  es.Lambda = Eigen::MatrixXd::Zero(K, K);
  es.eigenvalues = Eigen::VectorXd::Zero(K);
  int col = 0;
  std::size_t i = 0;
  while (i < evs.size()) {
    std::size_t j = i;
    while (j < evs.size() && evs[i] - evs[j] < 1e-9) ++j;
    const double lam = evs[i];
    const int mult = static_cast<int>(j - i);
    i = j;

    Eigen::MatrixXd B = es.A - lam * Eigen::MatrixXd::Identity(K, K);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    int geo = 0;
    for (int s = 0; s < K; ++s)
      if (svd.singularValues()(s) <= 1e-8 * smax) ++geo;
    const Eigen::MatrixXd kernel = svd.matrixV().rightCols(geo);

    for (int t = 0; t < mult; ++t) {
      es.Lambda(col + t, col + t) = lam;
      es.eigenvalues(col + t) = lam;
    }
    if (geo == mult) {
      es.V.block(0, col, K, mult) = kernel;
      col += mult;
    } else if (geo == mult - 1) {
      // One chain: pick the kernel direction lying in range(B), i.e.
      // orthogonal to the left null space, then solve B y = x for the
      // generalized vector.
      const Eigen::MatrixXd W = svd.matrixU().rightCols(geo);
      Eigen::JacobiSVD<Eigen::MatrixXd> inner(W.transpose() * kernel, Eigen::ComputeFullV);
      const Eigen::VectorXd c = inner.matrixV().col(geo - 1);
      Eigen::VectorXd x = kernel * c;
      x.normalize();
      svd.setThreshold(1e-10);
      const Eigen::VectorXd y = svd.solve(x);
      int placed = 0;
      for (int t = 0; t < geo; ++t) {
        Eigen::VectorXd z = kernel.col(t) - x * x.dot(kernel.col(t));
        for (int u = 0; u < placed; ++u) z -= es.V.col(col + u) * es.V.col(col + u).dot(z);
        if (z.norm() > 1e-8 && placed < geo - 1) {
          es.V.col(col + placed) = z.normalized();
          ++placed;
        }
      }
      if (placed != geo - 1)
        throw_numerical("eigenstructure: could not complete eigenvector basis at lambda = " +
                        format_g17(lam) + " (valence " + std::to_string(N) + ")");
      es.V.col(col + geo - 1) = x;
      es.V.col(col + geo) = y;
      es.Lambda(col + geo - 1, col + geo) = 1.0;
      es.jordan_p = col + geo - 1;
      es.jordan_q = col + geo;
      col += mult;
    } else {
      throw_numerical("eigenstructure: defective eigenvalue cluster at lambda = " +
                      format_g17(lam) + " (valence " + std::to_string(N) +
                      "), geometric multiplicity " + std::to_string(geo) + " of " +
                      std::to_string(mult));
    }
  }
  if (N != 3 && es.jordan_p != -1)
    throw_numerical("eigenstructure: unexpected Jordan block for valence " + std::to_string(N));

  // The dominant eigenvector of a row-stochastic matrix is constant; pin it
  // to exact ones so limit positions are affine combinations of the controls.
  if (std::abs(es.eigenvalues(0) - 1.0) > 1e-12)
    throw_numerical("eigenstructure: leading eigenvalue is not 1");
  es.V.col(0) /= es.V(0, 0);
  for (int r = 0; r < K; ++r) {
    if (std::abs(es.V(r, 0) - 1.0) > 1e-8)
      throw_numerical("eigenstructure: dominant eigenvector is not constant");
    es.V(r, 0) = 1.0;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(es.V);
  if (!lu.isInvertible())
    throw_numerical("eigenstructure: eigenvector matrix is singular (valence " +
                    std::to_string(N) + ")");
  es.Vinv = lu.inverse();

  const auto picks = detail::subpatch_picks(N);
  for (int k = 0; k < 3; ++k) {
    es.Mk[static_cast<std::size_t>(k)].resize(12, K);
    for (int r = 0; r < 12; ++r)
      es.Mk[static_cast<std::size_t>(k)].row(r) =
          es.Abar.row(picks[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)]);
    es.MkV[static_cast<std::size_t>(k)] = es.Mk[static_cast<std::size_t>(k)] * es.V;
  }
  return es;
}

// Shared per-valence cache. Entries are immutable; the returned reference
// stays valid for the program lifetime.
inline const EigenStructure& shared_eigenstructure(int N) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const EigenStructure>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it == cache.end())
    it = cache.emplace(N, std::make_unique<const EigenStructure>(eigenstructure(N))).first;
  return *it->second;
}

// ---------------------------------------------------------------------------
// Patch evaluation.

struct PatchEval {
  Vec3 p{}, pv{}, pw{};
  Vec3 pvv{}, pvw{}, pww{};
};

using ControlMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

namespace detail {

inline Vec3 weighted_point(const std::array<double, 12>& w, const ControlMatrix& c) {
  Vec3 acc{0.0, 0.0, 0.0};
  for (int i = 0; i < 12; ++i) {
    acc[0] += w[static_cast<std::size_t>(i)] * c(i, 0);
    acc[1] += w[static_cast<std::size_t>(i)] * c(i, 1);
    acc[2] += w[static_cast<std::size_t>(i)] * c(i, 2);
  }
  return acc;
}

}  // namespace detail

inline PatchEval eval_regular(const ControlMatrix& c, double v, double w, int order) {
  if (c.rows() != 12) throw_input("eval_regular: expected 12 control rows");
  const LoopBasis bas = regular_basis(v, w, order);
  PatchEval out;
  out.p = detail::weighted_point(bas.b, c);
  if (order >= 1) {
    out.pv = detail::weighted_point(bas.bv, c);
    out.pw = detail::weighted_point(bas.bw, c);
  }
  if (order >= 2) {
    out.pvv = detail::weighted_point(bas.bvv, c);
    out.pvw = detail::weighted_point(bas.bvw, c);
    out.pww = detail::weighted_point(bas.bww, c);
  }
  return out;
}

// Exact evaluation of an irregular patch from its N+6 canonical controls.
// The ring index n = ceil(-log2(v+w)) selects the self-similar layer (exact
// dyadic boundaries resolve to the smaller n), the subpatch map sends the
// layer triangle to the unit triangle, and the Jordan-aware power Lambda^(n-1)
// of the eigenvalues supplies the scaling law. Derivatives pick up factors
// (+-2)^n per order; they are unbounded at (0,0), which is rejected for
// order >= 1 and returns the limit position for order 0.
inline PatchEval eval_irregular(const ControlMatrix& c, double v, double w, int order) {
  const int K = static_cast<int>(c.rows());
  const int N = K - 6;
  if (N < 3) throw_input("eval_irregular: control data implies valence < 3");
  if (order < 0 || order > 2) throw_input("eval_irregular: order must be 0, 1, or 2");
  constexpr double slack = 1e-12;
  if (!(v >= -slack && w >= -slack && v + w <= 1.0 + slack))
    throw_numerical("eval_irregular: parameter (" + format_g17(v) + ", " + format_g17(w) +
                    ") outside the unit triangle");
  const EigenStructure& es = shared_eigenstructure(N);

  if (v + w <= 0.0) {
    if (order >= 1)
      throw_input("eval_irregular: derivatives at the extraordinary point (0,0) are undefined");
    const Eigen::RowVector3d limit = es.Vinv.row(0) * c;
    PatchEval out;
    out.p = Vec3{limit(0), limit(1), limit(2)};
    return out;
  }

  int n = std::max(1, static_cast<int>(std::ceil(-std::log2(v + w))));
  while (v + w < std::exp2(static_cast<double>(-n))) ++n;
  while (n > 1 && v + w >= std::exp2(static_cast<double>(-n + 1))) --n;
  const double scale = std::exp2(static_cast<double>(n - 1));
  const double vs = scale * v, ws = scale * w;

  int k;
  double tv, tw, sign;
  if (vs > 0.5) {
    k = 0; tv = 2.0 * vs - 1.0; tw = 2.0 * ws; sign = 1.0;
  } else if (ws > 0.5) {
    k = 2; tv = 2.0 * vs; tw = 2.0 * ws - 1.0; sign = 1.0;
  } else {
    k = 1; tv = 1.0 - 2.0 * vs; tw = 1.0 - 2.0 * ws; sign = -1.0;
  }

  Eigen::MatrixXd d = es.Vinv * c;  // eigen control data
  for (int r = 0; r < K; ++r) d.row(r) *= std::pow(es.eigenvalues(r), n - 1);
  if (es.jordan_p >= 0 && n >= 2) {
    const double mu = es.eigenvalues(es.jordan_p);
    d.row(es.jordan_p) +=
        (n - 1) * std::pow(mu, n - 2) * (es.Vinv.row(es.jordan_q) * c);
  }
  ControlMatrix p12 = es.MkV[static_cast<std::size_t>(k)] * d;

  const LoopBasis bas = regular_basis(tv, tw, order);
  const double f1 = sign * std::exp2(static_cast<double>(n));
  const double f2 = f1 * f1;
  PatchEval out;
  out.p = detail::weighted_point(bas.b, p12);
  if (order >= 1) {
    out.pv = detail::weighted_point(bas.bv, p12) * f1;
    out.pw = detail::weighted_point(bas.bw, p12) * f1;
  }
  if (order >= 2) {
    out.pvv = detail::weighted_point(bas.bvv, p12) * f2;
    out.pvw = detail::weighted_point(bas.bvw, p12) * f2;
    out.pww = detail::weighted_point(bas.bww, p12) * f2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patch tables: per-face control-vertex lists (VFL) in canonical order.

struct PatchInfo {
  bool regular = false;
  Index valence = 6;     // valence of the extraordinary corner; 6 if regular
  int corner_rot = 0;    // patch corner c maps to mesh corner (c+rot)%3
  std::vector<Index> vfl;  // 12 controls (regular) or valence+6 (irregular)
};

struct PatchTables {
  std::vector<PatchInfo> patches;  // one per face
};

namespace detail {

inline Index ring_at(const OneRing& ring, Index from, int steps, const char* what) {
  const auto& nb = ring.neighbors;
  const auto it = std::find(nb.begin(), nb.end(), from);
  if (it == nb.end())
    throw_input(std::string("build_patch_tables: ") + what + ": vertex " +
                std::to_string(from) + " not adjacent to " + std::to_string(ring.center));
  const int pos = static_cast<int>(it - nb.begin());
  const int n = static_cast<int>(nb.size());
  return nb[static_cast<std::size_t>(((pos + steps) % n + n) % n)];
}

}  // namespace detail

// Builds per-face control lists. Requires isolated extraordinary vertices;
// where two-ring neighborhoods wrap on small meshes the coalescing controls
// are simply repeated in the list.
inline PatchTables build_patch_tables(const TriMesh& mesh) {
  const std::vector<OneRing> rings = all_one_rings(mesh);
  PatchTables tables;
  tables.patches.resize(static_cast<std::size_t>(mesh.face_count()));

  for (Index f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[static_cast<std::size_t>(f)];
    int extraordinary = -1, count = 0;
    for (int k = 0; k < 3; ++k) {
      if (rings[static_cast<std::size_t>(fv[static_cast<std::size_t>(k)])].valence() != 6) {
        extraordinary = k;
        ++count;
      }
    }
    if (count > 1)
      throw_input("build_patch_tables: face " + std::to_string(f) +
                  " has " + std::to_string(count) +
                  " extraordinary corners; apply midpoint_subdivide to isolate them");

    PatchInfo& info = tables.patches[static_cast<std::size_t>(f)];
    if (count == 0) {
      const Index p = fv[0], q = fv[1], r = fv[2];
      const OneRing& r0 = rings[static_cast<std::size_t>(p)];
      const OneRing& r1 = rings[static_cast<std::size_t>(q)];
      const OneRing& r2 = rings[static_cast<std::size_t>(r)];
      info.regular = true;
      info.valence = 6;
      info.corner_rot = 0;
      info.vfl = {detail::ring_at(r0, q, 4, "regular"), detail::ring_at(r0, q, 3, "regular"),
                  detail::ring_at(r0, q, 5, "regular"), p,
                  detail::ring_at(r2, p, 5, "regular"), detail::ring_at(r1, r, 3, "regular"),
                  q,                                    r,
                  detail::ring_at(r2, p, 4, "regular"), detail::ring_at(r1, r, 4, "regular"),
                  detail::ring_at(r1, r, 5, "regular"), detail::ring_at(r2, p, 3, "regular")};
    } else {
      const int rot = extraordinary;
      const Index e = fv[static_cast<std::size_t>(rot)];
      const Index a = fv[static_cast<std::size_t>((rot + 1) % 3)];
      const Index b = fv[static_cast<std::size_t>((rot + 2) % 3)];
      const OneRing& re = rings[static_cast<std::size_t>(e)];
      const OneRing& ra = rings[static_cast<std::size_t>(a)];
      const OneRing& rb = rings[static_cast<std::size_t>(b)];
      const int N = re.valence();
      info.regular = false;
      info.valence = N;
      info.corner_rot = rot;
      info.vfl.reserve(static_cast<std::size_t>(N) + 6);
      info.vfl.push_back(e);
      const auto it = std::find(re.neighbors.begin(), re.neighbors.end(), a);
      if (it == re.neighbors.end())
        throw_input("build_patch_tables: broken ring at vertex " + std::to_string(e));
      const int start = static_cast<int>(it - re.neighbors.begin());
      for (int s = 0; s < N; ++s)
        info.vfl.push_back(re.neighbors[static_cast<std::size_t>((start + s) % N)]);
      if (info.vfl[2] != b)
        throw_input("build_patch_tables: face " + std::to_string(f) +
                    " is inconsistent with the ring orientation at vertex " + std::to_string(e));
      info.vfl.push_back(detail::ring_at(ra, e, 3, "irregular"));  // o1
      info.vfl.push_back(detail::ring_at(ra, e, 4, "irregular"));  // o2
      info.vfl.push_back(detail::ring_at(rb, a, 2, "irregular"));  // o3
      info.vfl.push_back(detail::ring_at(ra, e, 2, "irregular"));  // o4
      info.vfl.push_back(detail::ring_at(rb, a, 3, "irregular"));  // o5
      if (detail::ring_at(ra, e, 5, "irregular") != b ||
          detail::ring_at(rb, a, 1, "irregular") != info.vfl[static_cast<std::size_t>(N) + 2])
        throw_input("build_patch_tables: face " + std::to_string(f) +
                    " has an inconsistent two-ring neighborhood");
    }
  }
  return tables;
}

inline ControlMatrix gather_controls(const TriMesh& mesh, const PatchInfo& info) {
  ControlMatrix c(static_cast<Eigen::Index>(info.vfl.size()), 3);
  for (std::size_t i = 0; i < info.vfl.size(); ++i) {
    const Vec3& x = mesh.vertices[static_cast<std::size_t>(info.vfl[i])];
    c(static_cast<Eigen::Index>(i), 0) = x[0];
    c(static_cast<Eigen::Index>(i), 1) = x[1];
    c(static_cast<Eigen::Index>(i), 2) = x[2];
  }
  return c;
}

// Evaluates face f of the mesh at patch parameters (v,w). Patch corner (0,0)
// is mesh corner corner_rot (the extraordinary one for irregular faces).
inline PatchEval evaluate_patch(const TriMesh& mesh, const PatchTables& tables, Index f,
                                double v, double w, int order) {
  if (f < 0 || f >= mesh.face_count())
    throw_input("evaluate_patch: face index " + std::to_string(f) + " out of range");
  const PatchInfo& info = tables.patches[static_cast<std::size_t>(f)];
  const ControlMatrix c = gather_controls(mesh, info);
  return info.regular ? eval_regular(c, v, w, order) : eval_irregular(c, v, w, order);
}

}  // namespace willmin
