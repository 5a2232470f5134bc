#pragma once

// Points of R^3, S^3 and the orbit space S^2 x S^1 of the contraction
// a(x) = x/2, together with the maps relating them.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hopfms {

struct Vec3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
  constexpr double operator[](int i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x1 += o.x1;
    x2 += o.x2;
    x3 += o.x3;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x1 -= o.x1;
    x2 -= o.x2;
    x3 -= o.x3;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x1 *= s;
    x2 *= s;
    x3 *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

/// A point of R^3. The dynamics on R^3 and on the model cylinder share it.
using Point3 = Vec3;

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x1, -a.x2, -a.x3}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x1 / s, a.x2 / s, a.x3 / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

/// Angle between two nonzero vectors, accurate for nearly (anti)parallel input.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

/// Point of S^2 x S^1: a unit vector and a circle coordinate in [0,1).
struct OrbitSpacePoint {
  Vec3 u{0.0, 0.0, 1.0};
  double c = 0.0;
  friend bool operator==(const OrbitSpacePoint&, const OrbitSpacePoint&) = default;
};

/// Point of S^3 in R^4.
struct SpherePoint4 {
  std::array<double, 4> y{0.0, 0.0, 0.0, -1.0};
  friend bool operator==(const SpherePoint4&, const SpherePoint4&) = default;
};

inline constexpr SpherePoint4 kNorthPole{{0.0, 0.0, 0.0, 1.0}};
inline constexpr SpherePoint4 kSouthPole{{0.0, 0.0, 0.0, -1.0}};

inline double distance(const SpherePoint4& a, const SpherePoint4& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += (a.y[i] - b.y[i]) * (a.y[i] - b.y[i]);
  return std::sqrt(s);
}

/// Thrown when an input lies outside the domain of a map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

constexpr Point3 contract_a(const Point3& x) { return x * 0.5; }
constexpr Point3 expand_a(const Point3& x) { return x * 2.0; }

/// Reduce a real number to [0,1).
inline double wrap_unit(double c) {
  double w = c - std::floor(c);
  // c slightly below an integer can round up to exactly 1
  return w >= 1.0 ? 0.0 : w;
}

/// p(x) = (x/|x|, log2|x| mod 1).
inline OrbitSpacePoint project_p(const Point3& x) {
  const double r = norm(x);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("project_p: point must be nonzero and finite");
  return {x / r, wrap_unit(std::log2(r))};
}

/// Standard stereographic chart R^3 -> S^3 \ {N}.
inline SpherePoint4 stereographic(const Point3& x) {
  const double r2 = dot(x, x);
  const double d = r2 + 1.0;
  return {{2.0 * x.x1 / d, 2.0 * x.x2 / d, 2.0 * x.x3 / d, (r2 - 1.0) / d}};
}

inline Point3 stereographic_inv(const SpherePoint4& y) {
  const double d = 1.0 - y.y[3];
  if (!(d > 0.0)) throw DomainError("stereographic_inv: the north pole has no image in R^3");
  return {y.y[0] / d, y.y[1] / d, y.y[2] / d};
}

// The inverted chart around N is stereographic projection from the south
// pole; in R^3 terms it is the inversion w = x/|x|^2.
inline Point3 inverted_chart(const SpherePoint4& y) {
  const double d = 1.0 + y.y[3];
  if (!(d > 0.0)) throw DomainError("inverted_chart: the south pole has no image");
  return {y.y[0] / d, y.y[1] / d, y.y[2] / d};
}

inline SpherePoint4 inverted_chart_inv(const Point3& w) {
  const double r2 = dot(w, w);
  const double d = r2 + 1.0;
  return {{2.0 * w.x1 / d, 2.0 * w.x2 / d, 2.0 * w.x3 / d, (1.0 - r2) / d}};
}

inline Point3 inversion(const Point3& x) { return x / dot(x, x); }

/// Shorter arc between two circle coordinates, in [0, 1/2].
inline double circle_distance(double a, double b) {
  double d = std::fabs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

/// Signed wrap-aware increment from a to b, in [-1/2, 1/2].
inline double circle_increment(double a, double b) {
  double d = b - a;
  return d - std::round(d);
}

/// Product metric on S^2 x S^1: great-circle angle and shorter circle arc.
inline double orbit_space_distance(const OrbitSpacePoint& p, const OrbitSpacePoint& q) {
  return std::hypot(angle_between(p.u, q.u), circle_distance(p.c, q.c));
}

}  // namespace hopfms
