#pragma once

// Closed-form reference energies for the structured torus families. These are
// the analytic values the geometric evaluations must reproduce; the CLI verify
// command and several tests compare against them.

#include <algorithm>
#include <cmath>

#include "willmin/common.hpp"

namespace willmin {

// Circle-energy of a layered torus whose outer and inner boundary circles
// have radius ratio `ratio` in the inverted (planar annulus) picture:
//   W = 2 n arccos((c - 2t + c t^2) / (1 - 2tc + t^2)),  c = cos(2 pi / n).
// Only the outermost/innermost layers contribute; intermediate layers drop
// out. Monotone increasing in t on [0, 1), equal to 4 pi at t = 0.
inline double bobenko_torus_closed_form(int n, double ratio) {
  if (n < 3) throw_input("bobenko_torus_closed_form: n must be >= 3");
  if (!(ratio >= 0.0 && ratio < 1.0))
    throw_input("bobenko_torus_closed_form: ratio must lie in [0, 1)");
  const double c = std::cos(2.0 * kPi / n);
  const double arg = (c - 2.0 * ratio + c * ratio * ratio) /
                     (1.0 - 2.0 * ratio * c + ratio * ratio);
  return 2.0 * n * std::acos(std::clamp(arg, -1.0, 1.0));
}

// planar torus T_{m,n,r}: the ratio is r_{m-1} / r_0
inline double bobenko_planar_closed_form(int n, double radius_ratio) {
  return bobenko_torus_closed_form(n, radius_ratio);
}

// spherical torus T_{m,n,eps}: stereographic projection about the north pole
// maps the polar-angle-eps layer to radius cot(eps/2) and the pi-eps layer to
// tan(eps/2), so the effective ratio is tan^2(eps/2)
inline double bobenko_spherical_closed_form(int n, double eps) {
  if (!(eps > 0.0 && eps < kPi / 2.0))
    throw_input("bobenko_spherical_closed_form: eps must lie in (0, pi/2)");
  const double t = std::tan(eps / 2.0);
  return bobenko_torus_closed_form(n, t * t);
}

// limit of W_Centroid(T_{m,n,r}) as the first inner radius tends to 0
inline double centroid_limit_value(int n) {
  return 1.5 * n * std::sin(2.0 * kPi / n);
}

// limit of W_EffArea(T_{m,n,r}) as r_1 -> r_0 and r_{m-1} -> 0
inline double effarea_limit_value(int n) {
  return 3.0 * n * std::sin(2.0 * kPi / n);
}

}  // namespace willmin
