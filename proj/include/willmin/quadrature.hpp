#pragma once

// Composite Gauss quadrature on the parameter triangle Omega = {v,w >= 0,
// v + w <= 1}, plus the self-similar ring layout used to integrate over
// irregular patches: rings Omega \ (1/2)Omega, (1/2)Omega \ (1/4)Omega, ...
// down to depth D, each ring being three affine copies of Omega. The
// innermost 4^-D corner is dropped; the integrands in use are finite there.

#include <cmath>
#include <string>
#include <vector>

#include "willmin/common.hpp"

namespace willmin {

struct QuadNode {
  double v = 0.0, w = 0.0;
  double weight = 0.0;
};

namespace detail {

// Symmetric 7-point rule, degree 5. Barycentric data: the centroid, three
// points with two coordinates b1 (near the corners), three with two
// coordinates b2 (near the edge midpoints). Weights sum to 1 and are scaled
// by the cell area on use.
struct SevenPointRule {
  std::array<double, 7> l0, l1, l2, w;
};

inline const SevenPointRule& seven_point_rule() {
  static const SevenPointRule rule = [] {
    const double s15 = std::sqrt(15.0);
    const double b1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
    const double b2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
    SevenPointRule r;
    auto set = [&r](int i, double a, double b, double c, double wt) {
      r.l0[static_cast<std::size_t>(i)] = a;
      r.l1[static_cast<std::size_t>(i)] = b;
      r.l2[static_cast<std::size_t>(i)] = c;
      r.w[static_cast<std::size_t>(i)] = wt;
    };
    set(0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0);
    set(1, 1.0 - 2.0 * b1, b1, b1, w1);
    set(2, b1, 1.0 - 2.0 * b1, b1, w1);
    set(3, b1, b1, 1.0 - 2.0 * b1, w1);
    set(4, 1.0 - 2.0 * b2, b2, b2, w2);
    set(5, b2, 1.0 - 2.0 * b2, b2, w2);
    set(6, b2, b2, 1.0 - 2.0 * b2, w2);
    return r;
  }();
  return rule;
}

inline bool is_dyadic(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Appends the rule mapped to the triangle (p0, p1, p2); `area` is the
// triangle's area, so the appended weights sum to it.
inline void append_mapped_rule(double p0v, double p0w, double p1v, double p1w, double p2v,
                               double p2w, double area, std::vector<QuadNode>& out) {
  const SevenPointRule& r = seven_point_rule();
  for (int i = 0; i < 7; ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    QuadNode node;
    node.v = r.l0[s] * p0v + r.l1[s] * p1v + r.l2[s] * p2v;
    node.w = r.l0[s] * p0w + r.l1[s] * p1w + r.l2[s] * p2w;
    node.weight = r.w[s] * area;
    out.push_back(node);
  }
}

}  // namespace detail

// Composite 7-point rule over a uniform grid of size 1/n on Omega. Weights
// sum to area(Omega) = 1/2; exact for bivariate polynomials of total degree
// <= 5 on each cell, e.g. integral of v^p w^q over Omega is p! q!/(p+q+2)!.
inline std::vector<QuadNode> composite_rule(int n) {
  if (!detail::is_dyadic(n))
    throw_input("composite_rule: grid size " + std::to_string(n) + " is not a dyadic integer");
  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(7 * n * n));
  const double h = 1.0 / n;
  const double cell_area = 0.5 * h * h;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n - i; ++j) {
      const double v0 = i * h, w0 = j * h;
      detail::append_mapped_rule(v0, w0, v0 + h, w0, v0, w0 + h, cell_area, nodes);
      if (i + j < n - 1)
        detail::append_mapped_rule(v0 + h, w0 + h, v0, w0 + h, v0 + h, w0, cell_area, nodes);
    }
  }
  return nodes;
}

// Node of the irregular-patch layout: ring `depth` (1-based), subpatch k in
// {0,1,2} of that ring, local coordinates (tv,tw) in Omega of the mapped
// node, and the quadrature weight with the 4^-depth map Jacobian included.
struct RingQuadNode {
  int depth = 1;
  int subpatch = 0;
  double tv = 0.0, tw = 0.0;
  double weight = 0.0;
};

struct QuadRule {
  int n = 0;  // composite grid size for regular patches and ring 1
  int D = 0;  // ring truncation depth
  std::vector<QuadNode> regular;
  std::vector<RingQuadNode> rings;  // valence independent
};

// Recovers the position in Omega of a ring node. Subpatch 0 abuts the corner
// (1,0), subpatch 1 is the inverted middle triangle, subpatch 2 abuts (0,1);
// subpatch 1's map reverses orientation, matching eval_irregular.
inline void ring_node_param(const RingQuadNode& node, double& v, double& w) {
  double vs, ws;
  switch (node.subpatch) {
    case 0: vs = (node.tv + 1.0) * 0.5; ws = node.tw * 0.5; break;
    case 1: vs = (1.0 - node.tv) * 0.5; ws = (1.0 - node.tw) * 0.5; break;
    case 2: vs = node.tv * 0.5; ws = (node.tw + 1.0) * 0.5; break;
    default: throw_input("ring_node_param: subpatch out of range");
  }
  const double scale = std::exp2(static_cast<double>(1 - node.depth));
  v = scale * vs;
  w = scale * ws;
}

// Composite rule plus ring layout. Ring 1 uses grid size n, deeper rings a
// fixed grid of 2: self-similarity makes the integrand as smooth on ring d
// as on ring 1 after rescaling, so the coarse grid spends nodes where the
// ring actually carries area. Total ring weight is (1 - 4^-D)/2.
inline QuadRule make_quadrature(int n, int D) {
  if (!detail::is_dyadic(n))
    throw_input("make_quadrature: grid size " + std::to_string(n) + " is not a dyadic integer");
  if (D < 1) throw_input("make_quadrature: truncation depth must be >= 1");
  QuadRule rule;
  rule.n = n;
  rule.D = D;
  rule.regular = composite_rule(n);
  for (int depth = 1; depth <= D; ++depth) {
    const std::vector<QuadNode> base = composite_rule(depth == 1 ? n : std::min(n, 2));
    const double jac = std::exp2(static_cast<double>(-2 * depth));  // 4^-depth
    for (int k = 0; k < 3; ++k) {
      for (const QuadNode& q : base) {
        RingQuadNode node;
        node.depth = depth;
        node.subpatch = k;
        node.tv = q.v;
        node.tw = q.w;
        node.weight = q.weight * jac;
        rule.rings.push_back(node);
      }
    }
  }
  return rule;
}

}  // namespace willmin
