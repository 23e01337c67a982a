#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nldp/geometry.hpp"

namespace nldp {

// Closure supplying values beyond the truncation box together with the
// declared far-field bound |g(y)| <= C (1 + |y|)^kappa. Tail finiteness is
// a hypothesis carried by (C, kappa), never inferred from samples.
struct ExteriorField {
  std::function<double(const Pt&)> eval;
  double growth_C = 0.0;
  double growth_kappa = 0.0;

  static ExteriorField zero() {
    return {[](const Pt&) { return 0.0; }, 0.0, 0.0};
  }
  static ExteriorField constant(double c) {
    return {[c](const Pt&) { return c; }, std::abs(c), 0.0};
  }
};

// Nodal values on a uniform grid over [-L, L]^N, extended to all of R^N:
// multilinear interpolation inside the box, the exterior closure outside.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int dim, double box_halfwidth, int cells, ExteriorField exterior)
      : dim_(dim), L_(box_halfwidth), n_(cells), ext_(std::move(exterior)) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("GridFunction: dim must be 1 or 2");
    if (cells < 2) throw std::invalid_argument("GridFunction: need at least 2 cells per axis");
    if (!(box_halfwidth > 0.0)) throw std::invalid_argument("GridFunction: box halfwidth <= 0");
    values_.assign(node_count(), 0.0);
  }

  static GridFunction sample(int dim, double L, int cells, ExteriorField exterior,
                             const std::function<double(const Pt&)>& f) {
    GridFunction g(dim, L, cells, std::move(exterior));
    for (std::size_t i = 0; i < g.values_.size(); ++i) g.values_[i] = f(g.node_coord(i));
    return g;
  }

  int dim() const { return dim_; }
  double box_halfwidth() const { return L_; }
  int cells_per_axis() const { return n_; }
  int nodes_per_axis() const { return n_ + 1; }
  double spacing() const { return 2.0 * L_ / n_; }
  const ExteriorField& exterior() const { return ext_; }
  ExteriorField& exterior() { return ext_; }

  std::size_t node_count() const {
    std::size_t m = static_cast<std::size_t>(n_ + 1);
    return dim_ == 1 ? m : m * m;
  }

  std::size_t node_index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * (n_ + 1) + i;
  }

  Pt node_coord(std::size_t idx) const {
    const int m = n_ + 1;
    const int i = static_cast<int>(idx % m);
    const int j = static_cast<int>(idx / m);
    Pt p{-L_ + i * spacing(), 0.0};
    if (dim_ == 2) p[1] = -L_ + j * spacing();
    return p;
  }

  double& at(std::size_t idx) { return values_[idx]; }
  double at(std::size_t idx) const { return values_[idx]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool inside_box(const Pt& x) const {
    for (int d = 0; d < dim_; ++d)
      if (std::abs(x[d]) > L_) return false;
    return true;
  }

  // Interpolated value; falls back to the exterior closure outside the box.
  double eval(const Pt& x) const {
    if (!inside_box(x)) return ext_.eval(x);
    const double h = spacing();
    int ci[2] = {0, 0};
    double w[2] = {0.0, 0.0};
    for (int d = 0; d < dim_; ++d) {
      double u = (x[d] + L_) / h;
      int c = static_cast<int>(u);
      if (c >= n_) c = n_ - 1;
      if (c < 0) c = 0;
      ci[d] = c;
      w[d] = u - c;
    }
    if (dim_ == 1) {
      const double v0 = values_[node_index(ci[0])];
      const double v1 = values_[node_index(ci[0] + 1)];
      return v0 + w[0] * (v1 - v0);
    }
    const double v00 = values_[node_index(ci[0], ci[1])];
    const double v10 = values_[node_index(ci[0] + 1, ci[1])];
    const double v01 = values_[node_index(ci[0], ci[1] + 1)];
    const double v11 = values_[node_index(ci[0] + 1, ci[1] + 1)];
    const double a = v00 + w[0] * (v10 - v00);
    const double b = v01 + w[0] * (v11 - v01);
    return a + w[1] * (b - a);
  }

  // Tail-space membership L^{m-1}_{m alpha}: requires (m-1) kappa < m alpha.
  bool tail_finite(double m, double alpha) const {
    return (m - 1.0) * ext_.growth_kappa < m * alpha;
  }

  // u + c with a consistently shifted closure.
  GridFunction shifted(double c) const {
    GridFunction g = *this;
    for (double& v : g.values_) v += c;
    auto base = ext_.eval;
    g.ext_.eval = [base, c](const Pt& y) { return base(y) + c; };
    g.ext_.growth_C = ext_.growth_C + std::abs(c);
    return g;
  }

  double max_abs_node() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int dim_ = 1;
  double L_ = 1.0;
  int n_ = 2;
  std::vector<double> values_;
  ExteriorField ext_ = ExteriorField::zero();
};

}  // namespace nldp
