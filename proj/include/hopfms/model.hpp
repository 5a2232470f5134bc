#pragma once

// Model dynamics: the linear saddles a1, a2 with their neighbourhoods and
// foliations, the translation flow g^t on the cylinder, and the two-saddle
// flow phi^t whose time-1 map is glued into the tube.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hopfms/geometry.hpp"
#include "hopfms/linalg.hpp"

namespace hopfms {

// ---------------------------------------------------------------------------
// Linear saddles

/// a1(x) = (2 x1, x2/2, x3/2) for i = 1, a2 = a1^{-1} for i = 2.
inline Point3 linear_saddle(int i, const Point3& x) {
  if (i == 1) return {2.0 * x.x1, 0.5 * x.x2, 0.5 * x.x3};
  if (i == 2) return {0.5 * x.x1, 2.0 * x.x2, 2.0 * x.x3};
  throw std::invalid_argument("linear_saddle: index must be 1 or 2");
}

struct ModelNeighborhood {
  int index = 1;
  double size = 1.0;  // t in (0, 1]

  bool contains(const Point3& x) const {
    if (index == 1) return x.x1 * x.x1 * (x.x2 * x.x2 + x.x3 * x.x3) < size;
    if (index == 2) return (x.x1 * x.x1 + x.x2 * x.x2) * x.x3 * x.x3 < size;
    throw std::invalid_argument("ModelNeighborhood: index must be 1 or 2");
  }
};

inline bool neighborhood_contains(const ModelNeighborhood& n, const Point3& x) { return n.contains(x); }

enum class LeafKind { Unstable, Stable };

/// Leaf of one of the four model foliations, fixed by its anchor constants.
/// F^u_1: (x2, x3) = c; F^s_1: x1 = c; F^u_2: x3 = c; F^s_2: (x1, x2) = c.
struct FoliationLeaf {
  int index = 1;
  LeafKind kind = LeafKind::Unstable;
  std::vector<double> anchor;

  /// Coordinates fixed along the leaf.
  std::vector<int> fixed_axes() const {
    if (index == 1) return kind == LeafKind::Unstable ? std::vector<int>{1, 2} : std::vector<int>{0};
    return kind == LeafKind::Unstable ? std::vector<int>{2} : std::vector<int>{0, 1};
  }

  bool contains(const Point3& x, double tol = 0.0) const {
    const auto axes = fixed_axes();
    for (std::size_t k = 0; k < axes.size(); ++k)
      if (std::fabs(x[axes[k]] - anchor[k]) > tol) return false;
    return true;
  }
};

inline FoliationLeaf leaf_through(int i, LeafKind kind, const Point3& x) {
  if (i != 1 && i != 2) throw std::invalid_argument("leaf_through: index must be 1 or 2");
  FoliationLeaf leaf{i, kind, {}};
  for (int axis : leaf.fixed_axes()) leaf.anchor.push_back(x[axis]);
  return leaf;
}

// ---------------------------------------------------------------------------
// Translation flow

inline Point3 flow_g(const Point3& x, double t) { return {x.x1 + t, x.x2, x.x3}; }

// ---------------------------------------------------------------------------
// The two-saddle field

inline constexpr Point3 kSaddleP1{-1.0, 0.0, 0.0};
inline constexpr Point3 kSaddleP2{1.0, 0.0, 0.0};
inline constexpr Vec3 kTranslation{1.0, 0.0, 0.0};
/// Beyond this norm the raw field is the unit translation.
inline constexpr double kBallRadius = 4.0;

namespace detail {

// The three branches of the raw field, evaluated regardless of |x| so the
// seams can be compared.
inline Vec3 raw_inner(const Vec3& x, double r) {
  return {1.0 - (r - 4.0) * (r - 4.0) / 9.0, -x.x2, x.x3};
}
inline Vec3 raw_middle(const Vec3& x, double r) {
  const double s = std::sin(0.5 * std::numbers::pi * (r - 3.0)) - 1.0;
  return {1.0 - (r - 4.0) * (r - 4.0) / 9.0, 0.5 * x.x2 * s, -0.5 * x.x3 * s};
}
inline Vec3 raw_outer(const Vec3&) { return kTranslation; }

}  // namespace detail

/// The field written piecewise in |x|.
inline Vec3 raw_velocity(const Point3& x) {
  const double r = norm(x);
  if (r <= 2.0) return detail::raw_inner(x, r);
  if (r <= kBallRadius) return detail::raw_middle(x, r);
  return detail::raw_outer(x);
}

class PhiField {
 public:
  PhiField() = default;
  PhiField(double cutoff_inner, double cutoff_outer) : inner_(cutoff_inner), outer_(cutoff_outer) {
    if (!(0.0 < inner_ && inner_ < outer_ && outer_ < 2.0))
      throw std::invalid_argument("PhiField: need 0 < cutoff_inner < cutoff_outer < 2");
  }

  double cutoff_inner() const { return inner_; }
  double cutoff_outer() const { return outer_; }

  /// chi(rho): 1 up to the inner cutoff, 0 from the outer one, quintic between.
  double chi(double rho) const {
    if (rho <= inner_) return 1.0;
    if (rho >= outer_) return 0.0;
    const double t = (rho - inner_) / (outer_ - inner_);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  }

  Vec3 velocity(const Point3& x, bool raw = false) const {
    if (raw) return raw_velocity(x);
    const double c = chi(std::hypot(x.x2, x.x3));
    if (c == 0.0) return kTranslation;
    return kTranslation + c * (raw_velocity(x) - kTranslation);
  }

  /// True when the flow from x over time t is the exact translation: either
  /// the field is the translation on the whole line through x (rho beyond the
  /// cutoff) or the swept segment stays outside the ball.
  bool translation_only(const Point3& x, double t, bool raw = false) const {
    if (!raw && std::hypot(x.x2, x.x3) >= outer_) return true;
    const double a = std::min(x.x1, x.x1 + t);
    const double b = std::max(x.x1, x.x1 + t);
    const double closest = a > 0.0 ? a : (b < 0.0 ? b : 0.0);
    return std::hypot(closest, std::hypot(x.x2, x.x3)) > kBallRadius;
  }

 private:
  double inner_ = 1.2;
  double outer_ = 1.8;
};

inline Vec3 phi_velocity(const PhiField& field, const Point3& x, bool raw) { return field.velocity(x, raw); }

struct FlowOptions {
  double step = 1e-3;  // fixed RK4 step
  bool raw = false;    // integrate the uncut field
};

/// Time-t map of phi by classical RK4 with a fixed step.
inline Point3 flow_phi(const PhiField& field, Point3 x, double t, const FlowOptions& opt = {}) {
  if (!(opt.step > 0.0)) throw std::invalid_argument("flow_phi: step must be positive");
  if (t == 0.0) return x;
  if (field.translation_only(x, t, opt.raw)) return flow_g(x, t);
  const auto n = static_cast<long long>(std::ceil(std::fabs(t) / opt.step - 1e-9));
  const double h = t / static_cast<double>(n);
  for (long long i = 0; i < n; ++i) {
    const Vec3 k1 = field.velocity(x, opt.raw);
    const Vec3 k2 = field.velocity(x + (0.5 * h) * k1, opt.raw);
    const Vec3 k3 = field.velocity(x + (0.5 * h) * k2, opt.raw);
    const Vec3 k4 = field.velocity(x + h * k3, opt.raw);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

inline Point3 phi(const PhiField& field, const Point3& x, const FlowOptions& opt = {}) {
  return flow_phi(field, x, 1.0, opt);
}

inline Point3 phi_inverse(const PhiField& field, const Point3& x, const FlowOptions& opt = {}) {
  return flow_phi(field, x, -1.0, opt);
}

enum class Saddle { P1, P2 };

inline Point3 saddle_point(Saddle s) { return s == Saddle::P1 ? kSaddleP1 : kSaddleP2; }

/// Jacobian of the field at a saddle: diag(-+2/3, -1, 1). On the axis near
/// |x| = 1 the first component is 1 - (|x1| - 4)^2 / 9.
inline Mat3 saddle_field_jacobian(Saddle s) {
  return Mat3::diagonal(s == Saddle::P1 ? -2.0 / 3.0 : 2.0 / 3.0, -1.0, 1.0);
}

/// Eigenvalues of the time-1 map differential at a saddle, ascending by modulus.
inline std::array<double, 3> saddle_linearization(Saddle s) {
  if (s == Saddle::P1) return {std::exp(-1.0), std::exp(-2.0 / 3.0), std::exp(1.0)};
  return {std::exp(-1.0), std::exp(2.0 / 3.0), std::exp(1.0)};
}

/// Central-difference Jacobian of an arbitrary map R^3 -> R^3.
template <class F>
Mat3 finite_difference_jacobian(F&& f, const Point3& x, double h) {
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    Point3 xp = x;
    Point3 xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Vec3 d = (f(xp) - f(xm)) / (2.0 * h);
    for (int i = 0; i < 3; ++i) j(i, k) = d[i];
  }
  return j;
}

/// Differential of the time-1 map at x by central differences.
inline Mat3 time_one_jacobian(const PhiField& field, const Point3& x, const FlowOptions& opt = {},
                              double h = 1e-6) {
  return finite_difference_jacobian([&](const Point3& y) { return phi(field, y, opt); }, x, h);
}

// ---------------------------------------------------------------------------
// Zero census

struct FieldZeroCensus {
  std::vector<Point3> clusters;  // centroid of each cluster of candidate cells
  std::size_t candidate_cells = 0;
};

/// Grid search for zeros of the field over C ∩ {|x1| <= extent}: a cell is a
/// candidate when every component of the velocity takes both signs (or zero)
/// on its corners; face-adjacent candidates are merged.
inline FieldZeroCensus field_zero_census(const PhiField& field, double resolution = 0.05, double extent = 6.0,
                                         bool raw = false) {
  if (!(resolution > 0.0)) throw std::invalid_argument("field_zero_census: resolution must be positive");
  const auto n1 = static_cast<long long>(std::llround(2.0 * extent / resolution));
  const auto nr = static_cast<long long>(std::llround(4.0 / resolution));
  auto coord = [&](long long i, long long n, double half) {
    return half * (2.0 * static_cast<double>(i) - static_cast<double>(n)) / static_cast<double>(n);
  };
  const std::size_t s1 = static_cast<std::size_t>(n1 + 1);
  const std::size_t sr = static_cast<std::size_t>(nr + 1);
  // sign bits per corner: bit 2k = component k positive, bit 2k+1 = negative
  std::vector<std::uint8_t> sign(s1 * sr * sr, 0);
  auto corner = [&](long long i, long long j, long long k) {
    return (static_cast<std::size_t>(i) * sr + static_cast<std::size_t>(j)) * sr + static_cast<std::size_t>(k);
  };
  for (long long i = 0; i <= n1; ++i)
    for (long long j = 0; j <= nr; ++j)
      for (long long k = 0; k <= nr; ++k) {
        const Point3 x{coord(i, n1, extent), coord(j, nr, 2.0), coord(k, nr, 2.0)};
        const Vec3 v = field.velocity(x, raw);
        std::uint8_t b = 0;
        for (int c = 0; c < 3; ++c) {
          if (v[c] >= 0.0) b |= static_cast<std::uint8_t>(1u << (2 * c));
          if (v[c] <= 0.0) b |= static_cast<std::uint8_t>(1u << (2 * c + 1));
        }
        sign[corner(i, j, k)] = b;
      }

  const auto cells = static_cast<std::size_t>(n1) * static_cast<std::size_t>(nr) * static_cast<std::size_t>(nr);
  auto cell_index = [&](long long i, long long j, long long k) {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(nr) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(nr) +
           static_cast<std::size_t>(k);
  };
  std::vector<char> candidate(cells, 0);
  std::vector<std::size_t> parent(cells);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  FieldZeroCensus out;
  const double cell_r = 0.5 * std::sqrt(2.0) * resolution;
  for (long long i = 0; i < n1; ++i)
    for (long long j = 0; j < nr; ++j)
      for (long long k = 0; k < nr; ++k) {
        // cells entirely outside the cylinder are skipped
        const double y = coord(j, nr, 2.0) + 0.5 * resolution;
        const double z = coord(k, nr, 2.0) + 0.5 * resolution;
        if (std::hypot(y, z) - cell_r > 2.0) continue;
        std::uint8_t any = 0;
        for (int c = 0; c < 8; ++c) any |= sign[corner(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))];
        if (any != 0x3f) continue;
        const std::size_t id = cell_index(i, j, k);
        candidate[id] = 1;
        ++out.candidate_cells;
        if (i > 0 && candidate[cell_index(i - 1, j, k)]) parent[find(id)] = find(cell_index(i - 1, j, k));
        if (j > 0 && candidate[cell_index(i, j - 1, k)]) parent[find(id)] = find(cell_index(i, j - 1, k));
        if (k > 0 && candidate[cell_index(i, j, k - 1)]) parent[find(id)] = find(cell_index(i, j, k - 1));
      }

  std::vector<std::size_t> roots;
  std::vector<Vec3> sums;
  std::vector<double> counts;
  for (long long i = 0; i < n1; ++i)
    for (long long j = 0; j < nr; ++j)
      for (long long k = 0; k < nr; ++k) {
        const std::size_t id = cell_index(i, j, k);
        if (!candidate[id]) continue;
        const std::size_t root = find(id);
        std::size_t slot = 0;
        while (slot < roots.size() && roots[slot] != root) ++slot;
        if (slot == roots.size()) {
          roots.push_back(root);
          sums.push_back({});
          counts.push_back(0.0);
        }
        sums[slot] += Vec3{coord(i, n1, extent), coord(j, nr, 2.0), coord(k, nr, 2.0)} +
                      Vec3{0.5 * resolution, 0.5 * resolution, 0.5 * resolution};
        counts[slot] += 1.0;
      }
  for (std::size_t s = 0; s < roots.size(); ++s) out.clusters.push_back(sums[s] / counts[s]);
  return out;
}

}  // namespace hopfms
