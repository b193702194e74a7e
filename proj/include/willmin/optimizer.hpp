#pragma once

// Quadratic-penalty solver for constrained Willmore-type problems.
//
// The objective is either a PL Willmore discretization (optionally plus a
// Dirichlet regularizer) or the subdivision-surface energy; the constraints
// are the subset of {A = A0, V = V0, M = M0} selected by the problem kind.
// The penalty F(x; mu) = W + (mu/2) sum of squared active residuals is
// minimized for a growing schedule of mu. The inner solver is BFGS in
// inverse-Hessian form with Armijo backtracking; a plain gradient-descent
// mode is provided as well. Every energy evaluation uses deterministic
// reductions (see common.hpp), so a symmetric iterate produces a symmetric
// descent direction up to roundoff and rerunning a problem reproduces its
// trajectory bit for bit at a fixed thread count.
//
// The inverse Hessian is stored densely (9 V^2 doubles), which is the right
// trade below a few thousand vertices and keeps the update untruncated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "willmin/common.hpp"
#include "willmin/loop.hpp"
#include "willmin/mesh.hpp"
#include "willmin/pl_functionals.hpp"
#include "willmin/quadrature.hpp"
#include "willmin/ss_functionals.hpp"

namespace willmin {

// v0 = V / [(4 pi / 3) (A / 4 pi)^{3/2}], m0 = M / [4 pi (A / 4 pi)^{1/2}].
// With M = -integral of H (H < 0 on the unit sphere with outward normal)
// the unit sphere gives (1, 1).
inline std::pair<double, double> reduced_quantities(double A, double V, double M) {
  if (!(A > 0.0)) throw_input("reduced_quantities: area must be positive");
  const double r = std::sqrt(A / (4.0 * kPi));
  const double v0 = V / ((4.0 * kPi / 3.0) * r * r * r);
  const double m0 = M / (4.0 * kPi * r);
  return {v0, m0};
}

enum class Representation { PL, Loop };
enum class ProblemKind { Willmore, Canham, Helfrich };
enum class DescentMethod { BFGS, GradientDescent };
enum class TerminationReason { Converged, MaxIterations, LineSearchFailure, NonImmersed };

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Converged: return "converged";
    case TerminationReason::MaxIterations: return "max-iter";
    case TerminationReason::LineSearchFailure: return "line-search-failure";
    case TerminationReason::NonImmersed: return "non-immersed";
  }
  return "unknown";
}

struct PlOptions {
  WVariant w_variant = WVariant::NormalCur;
  // Discretization used for the M constraint and for reported M values.
  MVariant m_variant = MVariant::Cotan;
  double lambda = 0.0;  // weight of the Dirichlet regularizer, >= 0
  ConformalStructure structure = ConformalStructure::equilateral();
};

struct LoopOptions {
  int quad_grid = kDefaultQuadGrid;
  int ring_depth = kDefaultRingDepth;
};

struct OptimParams {
  double mu0 = 10.0;
  double mu_growth = 10.0;
  double mu_max = 1e8;
  double tol_g = 1e-6;   // on ||grad F||_inf, relative to max(1, |F|)
  double tol_c = 1e-6;   // on the relative constraint violations
  int max_inner = 5000;  // iteration cap per mu stage
  DescentMethod method = DescentMethod::BFGS;
  double armijo_c = 1e-4;
  int max_halvings = 40;
  // Reductions are deterministic regardless of thread count; the flag only
  // records the mode a run was produced under so reports can echo it.
  bool deterministic = true;
};

struct ProblemSpec {
  Representation rep = Representation::Loop;
  ProblemKind kind = ProblemKind::Willmore;
  PlOptions pl;
  LoopOptions loop;
  double A0 = 0.0;  // <= 0 selects the initial mesh area
  double v0 = 1.0;  // reduced volume target, in (0, 1]
  double m0 = 1.0;  // reduced total mean curvature target
  OptimParams params;
};

// Absolute constraint targets. A is constrained for every problem kind;
// V0 = v0 (4 pi / 3) (A0 / 4 pi)^{3/2} and M0 = m0 4 pi (A0 / 4 pi)^{1/2}.
struct Targets {
  double A0 = 0.0, V0 = 0.0, M0 = 0.0;
  bool use_v = false, use_m = false;
};

inline Targets resolve_targets(const ProblemSpec& spec, double initial_area) {
  Targets t;
  t.A0 = spec.A0 > 0.0 ? spec.A0 : initial_area;
  if (!(t.A0 > 0.0)) throw_input("resolve_targets: target area must be positive");
  t.use_v = spec.kind != ProblemKind::Willmore;
  t.use_m = spec.kind == ProblemKind::Helfrich;
  if (t.use_v && !(spec.v0 > 0.0 && spec.v0 <= 1.0))
    throw_input("resolve_targets: reduced volume target must lie in (0, 1]");
  const double r = std::sqrt(t.A0 / (4.0 * kPi));
  t.V0 = spec.v0 * (4.0 * kPi / 3.0) * r * r * r;
  t.M0 = spec.m0 * 4.0 * kPi * r;
  return t;
}

struct IterationRecord {
  int iteration = 0;
  double mu = 0.0;
  double F = 0.0;
  double W = 0.0, A = 0.0, V = 0.0, M = 0.0;
  double grad_inf = 0.0;   // ||grad F||_inf at this iterate
  double violation = 0.0;  // max relative constraint violation
};

struct OptimResult {
  TriMesh mesh;
  std::vector<IterationRecord> history;
  TerminationReason reason = TerminationReason::MaxIterations;
  bool feasible = false;
  double W = 0.0, A = 0.0, V = 0.0, M = 0.0;
  double v0 = 0.0, m0 = 0.0;
  // Largest symmetry_deviation over all accepted iterates, final included;
  // -1 when no SymmetrySpec was supplied.
  double symmetry_deviation = -1.0;
  int evaluations = 0;  // energy evaluations, line-search trials included
};

namespace detail {

inline Eigen::VectorXd flatten(const VertexVectorField& f) {
  Eigen::VectorXd x(3 * static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int k = 0; k < 3; ++k) x(3 * static_cast<Eigen::Index>(i) + k) = f[i][k];
  return x;
}

inline void assign_vertices(TriMesh& mesh, const Eigen::VectorXd& x) {
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    for (int k = 0; k < 3; ++k)
      mesh.vertices[i][k] = x(3 * static_cast<Eigen::Index>(i) + k);
}

// One evaluation of the energies entering the penalty. Gradients are
// flattened as (x0 y0 z0 x1 ...); constraint gradients are filled only for
// the active subset, and W/A/V/M values are all filled only when want_all
// is set (line-search trials skip the inactive ones).
struct ModelEval {
  double obj = 0.0;  // W, plus lambda * Dirichlet in PL mode
  double W = 0.0, A = 0.0, V = 0.0, M = 0.0;
  Eigen::VectorXd gobj, gA, gV, gM;
};

// Binds a problem to a fixed mesh connectivity. In Loop mode the patch and
// quadrature-basis tables depend only on connectivity, so they are built
// once here and reused by every evaluation of the run.
class EnergyModel {
 public:
  EnergyModel(const TriMesh& mesh, const ProblemSpec& spec) : spec_(spec) {
    if (spec_.pl.lambda < 0.0) throw_input("EnergyModel: lambda must be nonnegative");
    if (spec_.rep == Representation::Loop) {
      patches_ = build_patch_tables(mesh);
      qt_ = build_basis_tables(patches_,
                               make_quadrature(spec_.loop.quad_grid, spec_.loop.ring_depth));
    }
  }

  ModelEval evaluate(const TriMesh& mesh, const Targets& t, bool want_grad,
                     bool want_all) const {
    ModelEval e;
    if (spec_.rep == Representation::Loop) {
      const unsigned active =
          kFnW | kFnA | (t.use_v ? kFnV : 0u) | (t.use_m ? kFnM : 0u);
      const unsigned mask = want_all ? kFnAll : active;
      if (!want_grad) {
        const SsEnergies s = ss_energy(mesh, patches_, qt_, mask, false);
        e.W = s.W;
        e.obj = s.W;
        e.A = s.A;
        e.V = s.V;
        e.M = s.M;
        return e;
      }
      const SsEnergies s = ss_energy(mesh, patches_, qt_, active, true);
      e.W = s.W;
      e.obj = s.W;
      e.A = s.A;
      e.V = s.V;
      e.M = s.M;
      e.gobj = flatten(s.grad_W);
      e.gA = flatten(s.grad_A);
      if (t.use_v) e.gV = flatten(s.grad_V);
      if (t.use_m) e.gM = flatten(s.grad_M);
      const unsigned rest = kFnAll & ~active;
      if (want_all && rest != 0u) {
        const SsEnergies r = ss_energy(mesh, patches_, qt_, rest, false);
        if (rest & kFnV) e.V = r.V;
        if (rest & kFnM) e.M = r.M;
      }
      return e;
    }

    const EnergyResult w = w_pl(mesh, spec_.pl.w_variant);
    e.W = w.value;
    e.obj = w.value;
    e.A = area(mesh);
    if (want_grad) {
      e.gobj = flatten(w.gradient);
      e.gA = flatten(grad_area(mesh));
    }
    if (spec_.pl.lambda > 0.0) {
      const EnergyResult d = dirichlet_energy(mesh, spec_.pl.structure);
      e.obj += spec_.pl.lambda * d.value;
      if (want_grad) e.gobj += spec_.pl.lambda * flatten(d.gradient);
    }
    if (t.use_v || want_all) {
      e.V = volume(mesh);
      if (want_grad && t.use_v) e.gV = flatten(grad_volume(mesh));
    }
    if (t.use_m || want_all) {
      const EnergyResult m = m_pl(mesh, spec_.pl.m_variant);
      e.M = m.value;
      if (want_grad && t.use_m) e.gM = flatten(m.gradient);
    }
    return e;
  }

 private:
  ProblemSpec spec_;
  PatchTables patches_;
  QuadBasisTable qt_;
};

inline double penalty_value(const ModelEval& e, const Targets& t, double mu) {
  double s = sqr(e.A - t.A0);
  if (t.use_v) s += sqr(e.V - t.V0);
  if (t.use_m) s += sqr(e.M - t.M0);
  return e.obj + 0.5 * mu * s;
}

inline Eigen::VectorXd penalty_gradient(const ModelEval& e, const Targets& t, double mu) {
  Eigen::VectorXd g = e.gobj;
  g += (mu * (e.A - t.A0)) * e.gA;
  if (t.use_v) g += (mu * (e.V - t.V0)) * e.gV;
  if (t.use_m) g += (mu * (e.M - t.M0)) * e.gM;
  return g;
}

// Relative violations: |A - A0| / A0, |V - V0| / V0, |M - M0| / (|M0| + 1).
// M0 may vanish, hence the shifted denominator.
inline double violation(const ModelEval& e, const Targets& t) {
  double v = std::abs(e.A - t.A0) / t.A0;
  if (t.use_v) v = std::max(v, std::abs(e.V - t.V0) / std::abs(t.V0));
  if (t.use_m) v = std::max(v, std::abs(e.M - t.M0) / (std::abs(t.M0) + 1.0));
  return v;
}

}  // namespace detail

// F(x; mu) and its exact gradient, assembled from the module gradients.
// When spec.A0 <= 0 the area of the mesh passed here is taken as A0, i.e.
// this mesh is treated as the initial one.
inline std::pair<double, VertexVectorField> penalty_value_grad(const TriMesh& mesh,
                                                               const ProblemSpec& spec,
                                                               double mu) {
  const detail::EnergyModel model(mesh, spec);
  const Targets t = resolve_targets(spec, area(mesh));
  const detail::ModelEval e = model.evaluate(mesh, t, true, true);
  Eigen::VectorXd g = detail::penalty_gradient(e, t, mu);
  VertexVectorField grad(static_cast<std::size_t>(mesh.vertex_count()));
  for (std::size_t i = 0; i < grad.size(); ++i)
    for (int k = 0; k < 3; ++k) grad[i][k] = g(3 * static_cast<Eigen::Index>(i) + k);
  return {detail::penalty_value(e, t, mu), grad};
}

// Penalty-method minimization. The outer loop grows mu by mu_growth until
// the violations fall below tol_c or mu reaches mu_max; each stage runs the
// chosen descent method until ||grad F||_inf <= tol_g * max(1, |F|) or the
// stage iteration cap. Trial points where the energy is non-finite or not
// evaluable (not immersed, degenerate PL configuration) are line-search
// rejections, never hard aborts; only a failed initial evaluation throws.
// MaxIterations also covers an exhausted mu schedule: the run may then be
// stationary for each mu yet still infeasible, which the feasible flag and
// the history report honestly.
inline OptimResult minimize(const TriMesh& mesh0, const ProblemSpec& spec,
                            const SymmetrySpec* sym = nullptr) {
  const OptimParams& prm = spec.params;
  if (!(prm.mu0 > 0.0) || !(prm.mu_growth > 1.0) || !(prm.mu_max >= prm.mu0))
    throw_input("minimize: invalid mu schedule");
  if (!(prm.tol_g > 0.0) || !(prm.tol_c > 0.0) || prm.max_inner < 1 ||
      prm.max_halvings < 1 || !(prm.armijo_c > 0.0 && prm.armijo_c < 1.0))
    throw_input("minimize: invalid optimizer parameters");

  const detail::EnergyModel model(mesh0, spec);
  const Targets targets = resolve_targets(spec, area(mesh0));

  TriMesh work = mesh0;
  const Eigen::Index n = 3 * static_cast<Eigen::Index>(work.vertex_count());
  Eigen::VectorXd x = detail::flatten(work.vertices);

  OptimResult res;
  int evals = 0;

  // The initial evaluation must succeed; its errors propagate.
  detail::ModelEval cur = model.evaluate(work, targets, true, true);
  ++evals;

  double mu = prm.mu0;
  double F = detail::penalty_value(cur, targets, mu);
  Eigen::VectorXd g = detail::penalty_gradient(cur, targets, mu);

  double sym_dev = -1.0;
  auto track_sym = [&]() {
    if (sym) sym_dev = std::max(sym_dev, symmetry_deviation(work, *sym));
  };
  track_sym();

  int iter = 0;
  auto record = [&]() {
    res.history.push_back({iter, mu, F, cur.W, cur.A, cur.V, cur.M,
                           g.lpNorm<Eigen::Infinity>(), detail::violation(cur, targets)});
  };
  record();

  TerminationReason reason = TerminationReason::MaxIterations;
  Eigen::MatrixXd h_inv;
  Eigen::VectorXd d, xt, s, y;
  TriMesh trial = work;

  for (bool done = false; !done;) {
    bool h_fresh = true;
    auto reset_h = [&]() {
      h_inv = Eigen::MatrixXd::Identity(n, n) * (1.0 / std::max(g.norm(), 1e-12));
      h_fresh = true;
    };
    if (prm.method == DescentMethod::BFGS) reset_h();
    double alpha_gd = 1.0 / std::max(g.lpNorm<Eigen::Infinity>(), 1.0);

    bool stage_converged = false;
    bool stage_failed = false;
    bool failed_on_error = false;

    for (int it = 0; it < prm.max_inner; ++it) {
      const double gn = g.lpNorm<Eigen::Infinity>();
      if (gn <= prm.tol_g * std::max(1.0, std::abs(F))) {
        stage_converged = true;
        break;
      }

      if (prm.method == DescentMethod::BFGS) {
        d.noalias() = -(h_inv * g);
        if (g.dot(d) >= 0.0) {
          // Roundoff destroyed positive definiteness; fall back to -g.
          reset_h();
          d.noalias() = -(h_inv * g);
        }
      } else {
        d = -g / std::max(gn, 1e-300);
      }
      const double gd = g.dot(d);

      double alpha = prm.method == DescentMethod::BFGS ? 1.0 : alpha_gd;
      bool accepted = false;
      bool have_full = false;
      bool error_seen = false;
      detail::ModelEval next;
      double next_f = 0.0;
      for (int h = 0; h <= prm.max_halvings; ++h) {
        xt = x + alpha * d;
        detail::assign_vertices(trial, xt);
        // The first trial is evaluated with gradients: it is usually the
        // accepted one, and this saves re-evaluating after acceptance.
        const bool full = h == 0;
        bool ok = true;
        try {
          next = model.evaluate(trial, targets, full, full);
          ++evals;
        } catch (const Error&) {
          ok = false;
          error_seen = true;
        }
        if (ok) {
          next_f = detail::penalty_value(next, targets, mu);
          if (std::isfinite(next_f) && next_f <= F + prm.armijo_c * alpha * gd) {
            accepted = true;
            have_full = full;
            break;
          }
        }
        alpha *= 0.5;
      }

      if (!accepted) {
        if (prm.method == DescentMethod::BFGS && !h_fresh) {
          // Stale curvature may have produced a bad direction; one retry
          // from a fresh inverse Hessian before giving up.
          reset_h();
          continue;
        }
        stage_failed = true;
        failed_on_error = error_seen;
        break;
      }

      if (!have_full) {
        detail::assign_vertices(trial, xt);
        try {
          next = model.evaluate(trial, targets, true, true);
          ++evals;
        } catch (const Error&) {
          stage_failed = true;
          failed_on_error = true;
          break;
        }
        next_f = detail::penalty_value(next, targets, mu);
      }

      Eigen::VectorXd g_next = detail::penalty_gradient(next, targets, mu);
      if (prm.method == DescentMethod::BFGS) {
        s = xt - x;
        y = g_next - g;
        const double ys = y.dot(s);
        if (ys > 1e-12 * s.norm() * y.norm()) {
          const double rho = 1.0 / ys;
          const Eigen::VectorXd hy = h_inv * y;
          const double yhy = y.dot(hy);
          h_inv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
          h_inv.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
          h_fresh = false;
        } else {
          x = xt;
          cur = next;
          F = next_f;
          g.swap(g_next);
          reset_h();
          detail::assign_vertices(work, x);
          track_sym();
          ++iter;
          record();
          continue;
        }
      } else {
        alpha_gd = std::min(2.0 * alpha, 1e6);
      }

      x = xt;
      cur = next;
      F = next_f;
      g.swap(g_next);
      detail::assign_vertices(work, x);
      track_sym();
      ++iter;
      record();
    }

    const double viol = detail::violation(cur, targets);
    if (stage_failed) {
      reason = failed_on_error ? TerminationReason::NonImmersed
                               : TerminationReason::LineSearchFailure;
      done = true;
    } else if (stage_converged && viol <= prm.tol_c) {
      reason = TerminationReason::Converged;
      done = true;
    } else if (mu >= prm.mu_max) {
      reason = TerminationReason::MaxIterations;
      done = true;
    } else {
      mu = std::min(mu * prm.mu_growth, prm.mu_max);
      F = detail::penalty_value(cur, targets, mu);
      g = detail::penalty_gradient(cur, targets, mu);
    }
  }

  detail::assign_vertices(work, x);
  res.mesh = std::move(work);
  res.reason = reason;
  res.W = cur.W;
  res.A = cur.A;
  res.V = cur.V;
  res.M = cur.M;
  res.feasible = detail::violation(cur, targets) <= prm.tol_c;
  if (cur.A > 0.0) {
    const auto red = reduced_quantities(cur.A, cur.V, cur.M);
    res.v0 = red.first;
    res.m0 = red.second;
  } else {
    res.v0 = res.m0 = std::numeric_limits<double>::quiet_NaN();
  }
  res.symmetry_deviation = sym_dev;
  res.evaluations = evals;
  return res;
}

}  // namespace willmin
