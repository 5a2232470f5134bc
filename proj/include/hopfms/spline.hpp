#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hopfms/geometry.hpp"

namespace hopfms {

/// Interpolating cubic spline through uniformly spaced nodes P_0..P_{N-1}
/// extended by the rule P_{i+N} = q * P_i. With q = 1/2 this is the lift of
/// a closed curve in S^2 x S^1 (one period per unit parameter); with q = 1 it
/// is an ordinary periodic spline. The rule is inherited exactly by the
/// interpolant: value(tau + 1) == q * value(tau) up to rounding.
class EquivariantSpline {
 public:
  EquivariantSpline() = default;

  EquivariantSpline(std::vector<Vec3> nodes, double q) : nodes_(std::move(nodes)), q_(q) {
    if (nodes_.size() < 3) throw std::invalid_argument("EquivariantSpline: need at least 3 nodes");
    if (!(q_ > 0.0)) throw std::invalid_argument("EquivariantSpline: scale must be positive");
    solve_second_derivatives();
  }

  std::size_t size() const { return nodes_.size(); }
  double scale() const { return q_; }
  const std::vector<Vec3>& nodes() const { return nodes_; }

  Vec3 value(double tau) const { return eval(tau, 0); }
  /// d/dtau
  Vec3 derivative(double tau) const { return eval(tau, 1); }
  Vec3 second_derivative(double tau) const { return eval(tau, 2); }

 private:
  // Cyclic tridiagonal system with corner entries 1/q (top right) and q
  // (bottom left), solved by the Sherman-Morrison correction.
  void solve_second_derivatives() {
    const std::size_t n = nodes_.size();
    const double alpha = q_;
    const double beta = 1.0 / q_;
    std::vector<Vec3> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 prev = i == 0 ? nodes_[n - 1] / q_ : nodes_[i - 1];
      const Vec3 next = i + 1 == n ? nodes_[0] * q_ : nodes_[i + 1];
      rhs[i] = 6.0 * (prev - 2.0 * nodes_[i] + next);
    }
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] = 4.0 - gamma;
    diag[n - 1] = 4.0 - alpha * beta / gamma;

    auto tridiag = [&](auto rhs_at, auto& out) {
      std::vector<double> c_prime(n);
      double b = diag[0];
      out[0] = rhs_at(0) / b;
      for (std::size_t i = 1; i < n; ++i) {
        c_prime[i] = 1.0 / b;
        b = diag[i] - c_prime[i];
        out[i] = (rhs_at(i) - out[i - 1]) / b;
      }
      for (std::size_t i = n - 1; i-- > 0;) out[i] -= c_prime[i + 1] * out[i + 1];
    };

    std::vector<Vec3> x(n);
    tridiag([&](std::size_t i) { return rhs[i]; }, x);
    std::vector<double> z(n);
    tridiag([&](std::size_t i) { return i == 0 ? gamma : (i + 1 == n ? alpha : 0.0); }, z);

    const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    const Vec3 fact = (x[0] + beta * x[n - 1] / gamma) / denom;
    second_.resize(n);
    for (std::size_t i = 0; i < n; ++i) second_[i] = x[i] - z[i] * fact;
  }

  Vec3 eval(double tau, int order) const {
    const auto n = static_cast<double>(nodes_.size());
    const double period = std::floor(tau);
    double local = (tau - period) * n;
    auto i = static_cast<std::size_t>(local);
    if (i >= nodes_.size()) i = nodes_.size() - 1;
    const double w = local - static_cast<double>(i);
    const bool last = i + 1 == nodes_.size();
    const Vec3& p0 = nodes_[i];
    const Vec3 p1 = last ? nodes_[0] * q_ : nodes_[i + 1];
    const Vec3& m0 = second_[i];
    const Vec3 m1 = last ? second_[0] * q_ : second_[i + 1];
    const double v = 1.0 - w;
    Vec3 out;
    if (order == 0) {
      out = v * p0 + w * p1 + ((v * v * v - v) / 6.0) * m0 + ((w * w * w - w) / 6.0) * m1;
    } else if (order == 1) {
      out = (p1 - p0 + ((1.0 - 3.0 * v * v) / 6.0) * m0 + ((3.0 * w * w - 1.0) / 6.0) * m1) * n;
    } else {
      out = (v * m0 + w * m1) * (n * n);
    }
    return out * std::pow(q_, period);
  }

  std::vector<Vec3> nodes_;
  std::vector<Vec3> second_;
  double q_ = 1.0;
};

}  // namespace hopfms
