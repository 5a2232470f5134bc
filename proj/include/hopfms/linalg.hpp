#pragma once

// 3x3 matrices and their eigenvalues by closed-form cubic roots.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "hopfms/geometry.hpp"

namespace hopfms {

struct Mat3 {
  std::array<std::array<double, 3>, 3> a{};

  double& operator()(int i, int j) { return a[i][j]; }
  double operator()(int i, int j) const { return a[i][j]; }

  static Mat3 identity(double s = 1.0) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) m.a[i][i] = s;
    return m;
  }
  static Mat3 diagonal(double d0, double d1, double d2) {
    Mat3 m;
    m.a[0][0] = d0;
    m.a[1][1] = d1;
    m.a[2][2] = d2;
    return m;
  }
  /// Matrix with the given columns.
  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      m.a[i][0] = c0[i];
      m.a[i][1] = c1[i];
      m.a[i][2] = c2[i];
    }
    return m;
  }
  Vec3 row(int i) const { return {a[i][0], a[i][1], a[i][2]}; }
  Vec3 column(int j) const { return {a[0][j], a[1][j], a[2][j]}; }
};

inline Mat3 operator-(const Mat3& x, const Mat3& y) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.a[i][j] = x.a[i][j] - y.a[i][j];
  return m;
}

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m.a[i][j] += x.a[i][k] * y.a[k][j];
  return m;
}

inline Vec3 operator*(const Mat3& m, const Vec3& v) { return {dot(m.row(0), v), dot(m.row(1), v), dot(m.row(2), v)}; }

inline double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

inline double determinant(const Mat3& m) { return dot(m.row(0), cross(m.row(1), m.row(2))); }

/// Max-abs entry norm.
inline double max_abs(const Mat3& m) {
  double s = 0.0;
  for (const auto& r : m.a)
    for (double v : r) s = std::max(s, std::fabs(v));
  return s;
}

/// Solution of A x = b by Cramer's rule; throws on a singular matrix.
inline Vec3 solve(const Mat3& m, const Vec3& b) {
  const double det = determinant(m);
  if (!(std::fabs(det) > 0.0) || !std::isfinite(det)) throw std::domain_error("solve: singular matrix");
  const Vec3 c0 = m.column(0);
  const Vec3 c1 = m.column(1);
  const Vec3 c2 = m.column(2);
  return {dot(b, cross(c1, c2)) / det, dot(c0, cross(b, c2)) / det, dot(c0, cross(c1, b)) / det};
}

/// Roots of x^3 + a x^2 + b x + c, real roots polished by Newton steps.
inline std::array<std::complex<double>, 3> cubic_roots(double a, double b, double c) {
  using C = std::complex<double>;
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  std::array<C, 3> r;
  if (disc > 0.0) {
    // one real root, Cardano with the cancellation-free branch
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q + (q > 0.0 ? -sq : sq));
    const double v = u != 0.0 ? -p / (3.0 * u) : std::cbrt(-q);
    const double y = u + v;
    const double im = std::sqrt(3.0) / 2.0 * (u - v);
    r = {C(y - shift, 0.0), C(-0.5 * y - shift, im), C(-0.5 * y - shift, -im)};
  } else if (p == 0.0) {
    r = {C(-shift), C(-shift), C(-shift)};
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) r[k] = C(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift, 0.0);
  }
  for (auto& z : r) {
    if (z.imag() != 0.0) continue;
    double x = z.real();
    for (int it = 0; it < 2; ++it) {
      const double f = ((x + a) * x + b) * x + c;
      const double df = (3.0 * x + 2.0 * a) * x + b;
      if (std::fabs(df) < 1e-8 * (1.0 + std::fabs(b))) break;  // multiple root: Newton would not help
      x -= f / df;
    }
    z = C(x, 0.0);
  }
  return r;
}

/// Eigenvalues from the characteristic polynomial, ascending by modulus.
inline std::array<std::complex<double>, 3> eigenvalues(const Mat3& m) {
  const double tr = trace(m);
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  auto r = cubic_roots(-tr, minors, -determinant(m));
  std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return std::abs(x) < std::abs(y); });
  return r;
}

/// Unit null vector of (m - lambda I) for a simple real eigenvalue: the
/// largest cross product of two rows.
inline Vec3 eigenvector(const Mat3& m, double lambda) {
  const Mat3 s = m - Mat3::identity(lambda);
  Vec3 best{};
  double best_norm = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 c = cross(s.row(i), s.row((i + 1) % 3));
    const double n = norm(c);
    if (n > best_norm) {
      best = c;
      best_norm = n;
    }
  }
  if (!(best_norm > 0.0)) throw std::domain_error("eigenvector: eigenvalue is not simple");
  return best / best_norm;
}

}  // namespace hopfms
