#pragma once

// Shared basics: a 3-vector templated over the scalar type (so forward-mode
// AD scalars can flow through the same geometry code), an error type carrying
// a coarse failure category, deterministic reductions, and a small
// parallel_for. Nothing here knows about meshes.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace willmin {

using Index = std::int32_t;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Failure categories map 1:1 onto CLI exit codes: Input -> 3, Numerical -> 4,
// Infeasible -> 2.
class Error : public std::runtime_error {
 public:
  enum class Kind { Input, Numerical, Infeasible };
  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void throw_input(const std::string& msg) {
  throw Error(Error::Kind::Input, msg);
}
[[noreturn]] inline void throw_numerical(const std::string& msg) {
  throw Error(Error::Kind::Numerical, msg);
}
[[noreturn]] inline void throw_infeasible(const std::string& msg) {
  throw Error(Error::Kind::Infeasible, msg);
}

template <typename T>
T sqr(const T& v) {
  return v * v;
}

// ---------------------------------------------------------------------------
// 3-vector over an arbitrary scalar.

template <typename T>
struct V3 {
  T x{}, y{}, z{};

  V3() = default;
  V3(T xx, T yy, T zz) : x(std::move(xx)), y(std::move(yy)), z(std::move(zz)) {}

  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  V3 operator-() const { return {-x, -y, -z}; }
  V3& operator+=(const V3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  V3& operator-=(const V3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  V3& operator*=(const T& s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend V3 operator+(V3 a, const V3& b) { return a += b; }
  friend V3 operator-(V3 a, const V3& b) { return a -= b; }
  friend V3 operator*(V3 a, const T& s) { return a *= s; }
  friend V3 operator*(const T& s, V3 a) { return a *= s; }
  friend V3 operator/(const V3& a, const T& s) { return {a.x / s, a.y / s, a.z / s}; }
};

template <typename T>
T dot(const V3<T>& a, const V3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
V3<T> cross(const V3<T>& a, const V3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
T norm2(const V3<T>& a) {
  return dot(a, a);
}

template <typename T>
T norm(const V3<T>& a) {
  using std::sqrt;
  return sqrt(norm2(a));
}

using Vec3 = V3<double>;

inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

struct Mat3 {
  std::array<Vec3, 3> row{};  // acts by left multiplication on column vectors

  Vec3 operator*(const Vec3& v) const {
    return {dot(row[0], v), dot(row[1], v), dot(row[2], v)};
  }
};

// ---------------------------------------------------------------------------
// Deterministic reductions and parallel loops.
//
// The concurrency rule across the library: parallel work writes only to
// preassigned slots, and all reductions happen serially in index order.
// Results are therefore independent of the thread count.

inline double pairwise_sum(const double* p, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

inline int thread_count() {
  if (const char* env = std::getenv("WILLMIN_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// f(i) may only touch state owned by index i. Exceptions are rethrown on the
// calling thread; when several chunks throw, the lowest index wins so the
// surfaced error does not depend on scheduling.
template <typename F>
void parallel_for(std::int64_t n, F&& f) {
  const int max_threads = thread_count();
  if (max_threads <= 1 || n < 256) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  const int nt = static_cast<int>(std::min<std::int64_t>(max_threads, n));
  constexpr std::int64_t kChunk = 64;
  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::int64_t err_index = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr err;

  auto body = [&]() {
    for (;;) {
      const std::int64_t begin = next.fetch_add(kChunk, std::memory_order_relaxed);
      if (begin >= n) return;
      const std::int64_t end = std::min(begin + kChunk, n);
      for (std::int64_t i = begin; i < end; ++i) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
          return;
        }
      }
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(nt) - 1);
  for (int t = 1; t < nt; ++t) workers.emplace_back(body);
  body();
  for (auto& w : workers) w.join();
  if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// Formatting and hashing helpers for reports.

// %.17g preserves doubles exactly across a text round-trip.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace willmin
