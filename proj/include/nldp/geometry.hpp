#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace nldp {

// Points live in R^1 or R^2; unused components stay zero.
using Pt = std::array<double, 2>;

inline double dist(const Pt& a, const Pt& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return std::sqrt(s);
}

inline double norm(const Pt& a, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += a[d] * a[d];
  return std::sqrt(s);
}

inline double norm_inf(const Pt& a, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s = std::max(s, std::abs(a[d]));
  return s;
}

// Axis-aligned box, the quadrature atom.
struct Box {
  Pt lo{0.0, 0.0};
  Pt hi{0.0, 0.0};

  double side(int d) const { return hi[d] - lo[d]; }
  double diameter(int dim) const {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += side(d) * side(d);
    return std::sqrt(s);
  }
  double volume(int dim) const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= side(d);
    return v;
  }
  Pt center() const { return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}; }
};

// Euclidean distance between two boxes (0 when they touch or overlap).
inline double box_distance(const Box& a, const Box& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double gap = std::max({a.lo[d] - b.hi[d], b.lo[d] - a.hi[d], 0.0});
    s += gap * gap;
  }
  return std::sqrt(s);
}

inline bool boxes_touch(const Box& a, const Box& b, int dim) {
  for (int d = 0; d < dim; ++d) {
    if (a.lo[d] > b.hi[d] || b.lo[d] > a.hi[d]) return false;
  }
  return true;
}

enum class RegionKind { Ball, BoxKind };

// B_r(x0) or the cube [x0-r, x0+r]^N.
struct Region {
  Pt center{0.0, 0.0};
  double radius = 0.0;
  RegionKind kind = RegionKind::Ball;
  int dim = 1;

  static Region ball(Pt c, double r, int dim) { return {c, r, RegionKind::Ball, dim}; }
  static Region box(Pt c, double halfwidth, int dim) {
    return {c, halfwidth, RegionKind::BoxKind, dim};
  }

  bool contains(const Pt& x) const {
    if (kind == RegionKind::Ball) return dist(x, center, dim) <= radius;
    for (int d = 0; d < dim; ++d)
      if (std::abs(x[d] - center[d]) > radius) return false;
    return true;
  }

  Box bounding_box() const {
    Box b;
    for (int d = 0; d < dim; ++d) {
      b.lo[d] = center[d] - radius;
      b.hi[d] = center[d] + radius;
    }
    return b;
  }

  // Exact Lebesgue measure.
  double measure() const {
    if (kind == RegionKind::BoxKind) return std::pow(2.0 * radius, dim);
    if (dim == 1) return 2.0 * radius;
    return M_PI * radius * radius;
  }

  Region scaled(double k) const { return {center, k * radius, kind, dim}; }
};

// Classification of a box against a region, used to decide clipping.
enum class BoxLocation { Inside, Outside, Boundary };

inline BoxLocation classify_box(const Box& b, const Region& r) {
  if (r.kind == RegionKind::BoxKind) {
    bool inside = true, outside = false;
    for (int d = 0; d < r.dim; ++d) {
      const double lo = r.center[d] - r.radius, hi = r.center[d] + r.radius;
      if (b.lo[d] >= hi || b.hi[d] <= lo) outside = true;
      if (b.lo[d] < lo || b.hi[d] > hi) inside = false;
    }
    if (outside) return BoxLocation::Outside;
    return inside ? BoxLocation::Inside : BoxLocation::Boundary;
  }
  // Ball: compare nearest/farthest corner distances to the radius.
  double near2 = 0.0, far2 = 0.0;
  for (int d = 0; d < r.dim; ++d) {
    const double lo = b.lo[d] - r.center[d], hi = b.hi[d] - r.center[d];
    const double nd = (lo > 0.0) ? lo : ((hi < 0.0) ? -hi : 0.0);
    const double fd = std::max(std::abs(lo), std::abs(hi));
    near2 += nd * nd;
    far2 += fd * fd;
  }
  const double r2 = r.radius * r.radius;
  if (near2 >= r2) return BoxLocation::Outside;
  if (far2 <= r2) return BoxLocation::Inside;
  return BoxLocation::Boundary;
}

}  // namespace nldp
