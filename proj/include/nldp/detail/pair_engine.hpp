#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "nldp/detail/gauss.hpp"
#include "nldp/geometry.hpp"

namespace nldp {

struct QuadConfig {
  int gauss = 5;               // Gauss points per axis per quadrature box
  double admissibility = 3.0;  // separated when dist >= 0.5*admissibility*max(diam)
  int diag_levels = 46;        // graded dyadic levels toward the diagonal
  int clip_depth = 4;          // pre-subdivision of region-boundary cells (dim 2)
  bool check_divergence = true;

  static QuadConfig reference() { return {}; }
  static QuadConfig assembly() {
    QuadConfig c;
    c.gauss = 4;
    c.admissibility = 1.0;
    c.diag_levels = 30;
    c.check_divergence = false;
    return c;
  }
};

class QuadratureSingularity : public std::runtime_error {
 public:
  explicit QuadratureSingularity(const std::string& m) : std::runtime_error(m) {}
};

namespace detail {

// Visits quadrature point pairs (x, y, weight) covering A x B against the
// kernel |x-y|^{-N-sigma}. The visitor returns its contribution (integrand
// times the emitted weight), which feeds the divergence guard.
//
// Separated pairs get tensor Gauss. Everything else is integrated in strip
// coordinates z = y - x: the z-domain is the Minkowski difference B (-) A,
// graded geometrically toward z = 0, and for each z node the x-integral
// runs over the exact overlap rectangle A cap (B - z). This handles
// identical, touching and nearly-touching cells in one scheme and never
// produces x == y.
template <class Visit>
class PairEngine {
 public:
  PairEngine(int dim, double sigma, const QuadConfig& cfg, Visit& visit)
      : dim_(dim), sigma_(sigma), cfg_(cfg), visit_(visit), rule_(gauss_rule(cfg.gauss)) {}

  void box_pair(const Box& A, const Box& B) {
    const double gap = box_distance(A, B, dim_);
    const double dmax = std::max(A.diameter(dim_), B.diameter(dim_));
    if (gap >= 0.5 * cfg_.admissibility * dmax)
      gauss_pair(A, B);
    else
      strip_pair(A, B);
  }

 private:
  double kernel_pow(double r) const { return std::pow(r, -(dim_ + sigma_)); }

  void gauss_pair(const Box& A, const Box& B) {
    const int g = rule_.n;
    if (dim_ == 1) {
      const double ca = 0.5 * (A.lo[0] + A.hi[0]), ha = 0.5 * A.side(0);
      const double cb = 0.5 * (B.lo[0] + B.hi[0]), hb = 0.5 * B.side(0);
      for (int i = 0; i < g; ++i) {
        const Pt x{ca + ha * rule_.x[i], 0.0};
        const double wx = ha * rule_.w[i];
        for (int j = 0; j < g; ++j) {
          const Pt y{cb + hb * rule_.x[j], 0.0};
          visit_(x, y, wx * hb * rule_.w[j] * kernel_pow(std::abs(x[0] - y[0])));
        }
      }
      return;
    }
    for (int i0 = 0; i0 < g; ++i0)
      for (int i1 = 0; i1 < g; ++i1) {
        const Pt x{0.5 * (A.lo[0] + A.hi[0]) + 0.5 * A.side(0) * rule_.x[i0],
                   0.5 * (A.lo[1] + A.hi[1]) + 0.5 * A.side(1) * rule_.x[i1]};
        const double wx = 0.25 * A.side(0) * A.side(1) * rule_.w[i0] * rule_.w[i1];
        for (int j0 = 0; j0 < g; ++j0)
          for (int j1 = 0; j1 < g; ++j1) {
            const Pt y{0.5 * (B.lo[0] + B.hi[0]) + 0.5 * B.side(0) * rule_.x[j0],
                       0.5 * (B.lo[1] + B.hi[1]) + 0.5 * B.side(1) * rule_.x[j1]};
            visit_(x, y,
                   wx * 0.25 * B.side(0) * B.side(1) * rule_.w[j0] * rule_.w[j1] *
                       kernel_pow(dist(x, y, dim_)));
          }
      }
  }

  // Integrates one z-rectangle: Gauss in z, then Gauss over the overlap
  // A cap (B - z). Returns the absolute contribution mass.
  double z_rect(const Box& A, const Box& B, const double zlo[2], const double zhi[2]) {
    const int g = rule_.n;
    double mass = 0.0;
    if (dim_ == 1) {
      const double zc = 0.5 * (zlo[0] + zhi[0]), zh = 0.5 * (zhi[0] - zlo[0]);
      if (zh <= 0.0) return 0.0;
      for (int i = 0; i < g; ++i) {
        const double z = zc + zh * rule_.x[i];
        const double olo = std::max(A.lo[0], B.lo[0] - z);
        const double ohi = std::min(A.hi[0], B.hi[0] - z);
        if (olo >= ohi) continue;
        const double wz = zh * rule_.w[i] * kernel_pow(std::abs(z));
        const double xc = 0.5 * (olo + ohi), xh = 0.5 * (ohi - olo);
        for (int j = 0; j < g; ++j) {
          const Pt x{xc + xh * rule_.x[j], 0.0};
          const Pt y{x[0] + z, 0.0};
          mass += std::abs(visit_(x, y, wz * xh * rule_.w[j]));
        }
      }
      return mass;
    }
    const double zc0 = 0.5 * (zlo[0] + zhi[0]), zh0 = 0.5 * (zhi[0] - zlo[0]);
    const double zc1 = 0.5 * (zlo[1] + zhi[1]), zh1 = 0.5 * (zhi[1] - zlo[1]);
    if (zh0 <= 0.0 || zh1 <= 0.0) return 0.0;
    for (int i0 = 0; i0 < g; ++i0)
      for (int i1 = 0; i1 < g; ++i1) {
        const double z0 = zc0 + zh0 * rule_.x[i0];
        const double z1 = zc1 + zh1 * rule_.x[i1];
        const double olo0 = std::max(A.lo[0], B.lo[0] - z0);
        const double ohi0 = std::min(A.hi[0], B.hi[0] - z0);
        const double olo1 = std::max(A.lo[1], B.lo[1] - z1);
        const double ohi1 = std::min(A.hi[1], B.hi[1] - z1);
        if (olo0 >= ohi0 || olo1 >= ohi1) continue;
        const double wz = zh0 * zh1 * rule_.w[i0] * rule_.w[i1] *
                          kernel_pow(std::sqrt(z0 * z0 + z1 * z1));
        const double xc0 = 0.5 * (olo0 + ohi0), xh0 = 0.5 * (ohi0 - olo0);
        const double xc1 = 0.5 * (olo1 + ohi1), xh1 = 0.5 * (ohi1 - olo1);
        for (int j0 = 0; j0 < g; ++j0)
          for (int j1 = 0; j1 < g; ++j1) {
            const Pt x{xc0 + xh0 * rule_.x[j0], xc1 + xh1 * rule_.x[j1]};
            const Pt y{x[0] + z0, x[1] + z1};
            mass += std::abs(visit_(x, y, wz * xh0 * xh1 * rule_.w[j0] * rule_.w[j1]));
          }
      }
    return mass;
  }

  void strip_pair(const Box& A, const Box& B) {
    // z-domain: Minkowski difference B (-) A.
    double mlo[2], mhi[2];
    double rsup = 0.0;
    for (int d = 0; d < dim_; ++d) {
      mlo[d] = B.lo[d] - A.hi[d];
      mhi[d] = B.hi[d] - A.lo[d];
      rsup = std::max({rsup, std::abs(mlo[d]), std::abs(mhi[d])});
    }
    if (rsup <= 0.0) return;

    double prev = -1.0;
    int growing = 0;
    double acc = 0.0;
    for (int k = 0; k < cfg_.diag_levels; ++k) {
      const double r_hi = rsup * std::pow(0.5, k);
      const double r_lo = 0.5 * r_hi;
      double level = 0.0;
      if (dim_ == 1) {
        for (double sgn : {1.0, -1.0}) {
          double zl[1] = {std::max(sgn > 0 ? r_lo : -r_hi, mlo[0])};
          double zh[1] = {std::min(sgn > 0 ? r_hi : -r_lo, mhi[0])};
          if (zl[0] < zh[0]) level += z_rect(A, B, zl, zh);
        }
      } else {
        // Sup-norm annulus split into 8 rectangles, clipped to the z-domain.
        const double rects[8][4] = {{r_lo, r_hi, -r_lo, r_lo},  {-r_hi, -r_lo, -r_lo, r_lo},
                                    {-r_lo, r_lo, r_lo, r_hi},  {-r_lo, r_lo, -r_hi, -r_lo},
                                    {r_lo, r_hi, r_lo, r_hi},   {-r_hi, -r_lo, r_lo, r_hi},
                                    {r_lo, r_hi, -r_hi, -r_lo}, {-r_hi, -r_lo, -r_hi, -r_lo}};
        for (const auto& rc : rects) {
          double zl[2] = {std::max(rc[0], mlo[0]), std::max(rc[2], mlo[1])};
          double zh[2] = {std::min(rc[1], mhi[0]), std::min(rc[3], mhi[1])};
          if (zl[0] < zh[0] && zl[1] < zh[1]) level += z_rect(A, B, zl, zh);
        }
      }
      acc += level;
      // Contributions of an integrable power decay geometrically toward the
      // diagonal; sustained growth flags a non-integrable configuration.
      if (cfg_.check_divergence && k > 4 && prev >= 0.0) {
        if (level > prev * 1.05 && level > 1e-14 * acc)
          ++growing;
        else
          growing = 0;
        if (growing >= 10)
          throw QuadratureSingularity(
              "pair integral diverges under diagonal refinement (non-integrable singularity)");
      }
      prev = level;
      if (level < 1e-16 * acc && k > 8) break;
    }
  }

  int dim_;
  double sigma_;
  QuadConfig cfg_;
  Visit& visit_;
  GaussRule rule_;
};

}  // namespace detail
}  // namespace nldp
