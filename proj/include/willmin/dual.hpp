#pragma once

// Minimal forward-mode AD scalar with a fixed-capacity derivative vector.
// PL energies are sums of ring- or edge-local terms, so one evaluation never
// carries more than a 1-ring's worth of variables: 3*(valence+1) slots.
// Entries d[i] with i >= n are semantically zero; constants have n = 0, which
// keeps arithmetic with them cheap.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "willmin/common.hpp"

namespace willmin {

inline constexpr int kMaxDualVars = 96;  // supports vertex valences up to 31

struct Dual {
  double v = 0.0;
  int n = 0;
  std::array<double, kMaxDualVars> d;  // only the first n entries are meaningful

  Dual() = default;
  Dual(double value) : v(value), n(0) {}  // implicit: constants enter silently

  double deriv(int i) const { return i < n ? d[static_cast<std::size_t>(i)] : 0.0; }
};

// seeds variable slot `var` out of `total`
inline Dual dual_var(double value, int var) {
  if (var >= kMaxDualVars)
    throw_input("dual: more than " + std::to_string(kMaxDualVars) +
                " local variables (vertex valence too large)");
  Dual r;
  r.v = value;
  r.n = var + 1;
  for (int i = 0; i <= var; ++i) r.d[static_cast<std::size_t>(i)] = 0.0;
  r.d[static_cast<std::size_t>(var)] = 1.0;
  return r;
}

inline double val(double x) { return x; }
inline double val(const Dual& x) { return x.v; }

inline double acos_clamped(double x) { return std::acos(std::min(1.0, std::max(-1.0, x))); }

inline Dual operator-(const Dual& a) {
  Dual r;
  r.v = -a.v;
  r.n = a.n;
  for (int i = 0; i < a.n; ++i) r.d[static_cast<std::size_t>(i)] = -a.d[static_cast<std::size_t>(i)];
  return r;
}

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v + b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[static_cast<std::size_t>(i)] = a.deriv(i) + b.deriv(i);
  return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v - b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[static_cast<std::size_t>(i)] = a.deriv(i) - b.deriv(i);
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v * b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i)
    r.d[static_cast<std::size_t>(i)] = a.v * b.deriv(i) + b.v * a.deriv(i);
  return r;
}

inline Dual operator/(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v / b.v;
  r.n = std::max(a.n, b.n);
  const double inv = 1.0 / b.v;
  for (int i = 0; i < r.n; ++i)
    r.d[static_cast<std::size_t>(i)] = (a.deriv(i) - r.v * b.deriv(i)) * inv;
  return r;
}

inline Dual& operator+=(Dual& a, const Dual& b) { return a = a + b; }
inline Dual& operator-=(Dual& a, const Dual& b) { return a = a - b; }
inline Dual& operator*=(Dual& a, const Dual& b) { return a = a * b; }

inline Dual sqrt(const Dual& a) {
  Dual r;
  r.v = std::sqrt(a.v);
  r.n = a.n;
  const double f = r.v > 0.0 ? 0.5 / r.v : 0.0;  // freeze at 0 (non-smooth point)
  for (int i = 0; i < a.n; ++i) r.d[static_cast<std::size_t>(i)] = f * a.d[static_cast<std::size_t>(i)];
  return r;
}

// arccos with the argument clamped to [-1, 1]; outside (or exactly at) the
// clamp the derivative is frozen to 0.
inline Dual acos_clamped(const Dual& a) {
  Dual r;
  r.n = a.n;
  if (a.v >= 1.0) {
    r.v = 0.0;
  } else if (a.v <= -1.0) {
    r.v = kPi;
  } else {
    r.v = std::acos(a.v);
    const double f = -1.0 / std::sqrt(1.0 - a.v * a.v);
    for (int i = 0; i < a.n; ++i) r.d[static_cast<std::size_t>(i)] = f * a.d[static_cast<std::size_t>(i)];
    return r;
  }
  for (int i = 0; i < a.n; ++i) r.d[static_cast<std::size_t>(i)] = 0.0;
  return r;
}

inline Dual atan2(const Dual& y, const Dual& x) {
  Dual r;
  r.v = std::atan2(y.v, x.v);
  r.n = std::max(y.n, x.n);
  const double inv = 1.0 / (x.v * x.v + y.v * y.v);
  for (int i = 0; i < r.n; ++i)
    r.d[static_cast<std::size_t>(i)] = (x.v * y.deriv(i) - y.v * x.deriv(i)) * inv;
  return r;
}

inline V3<Dual> dual_point(const Vec3& p, int slot) {
  return {dual_var(p.x, 3 * slot + 0), dual_var(p.y, 3 * slot + 1), dual_var(p.z, 3 * slot + 2)};
}

inline V3<Dual> dual_const(const Vec3& p) { return {Dual(p.x), Dual(p.y), Dual(p.z)}; }

}  // namespace willmin
