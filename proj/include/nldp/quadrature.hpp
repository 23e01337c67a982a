#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nldp/detail/pair_engine.hpp"
#include "nldp/geometry.hpp"
#include "nldp/grid.hpp"
#include "nldp/kernels.hpp"
#include "nldp/model.hpp"
#include "nldp/summation.hpp"

namespace nldp {

// How a region is cut into quadrature cells. Alignment matters whenever the
// integrand involves a grid interpolant: cells aligned with grid lines keep
// the integrand piecewise-smooth per cell.
struct PartitionSpec {
  double cell_size = 0.125;
  double origin = 0.0;  // cells sit at origin + k*cell_size per axis
  bool align = true;
  int clip_depth = 4;

  static PartitionSpec for_grid(const GridFunction& g, int coarsen = 1) {
    PartitionSpec p;
    p.cell_size = g.spacing() * coarsen;
    p.origin = -g.box_halfwidth();
    return p;
  }
  static PartitionSpec unaligned(double cell) {
    PartitionSpec p;
    p.cell_size = cell;
    p.align = false;
    return p;
  }
};

struct QCell {
  Box box;
  bool clip = false;  // true: membership must be tested pointwise
};

// Grid-aligned cover of a region. 1D ball/box regions are cut exactly;
// 2D ball boundaries are pre-subdivided clip_depth times, leaving only a
// thin strip of clip-flagged cells.
std::vector<QCell> partition_region(const Region& region, const PartitionSpec& part);

using PairFn = std::function<double(const Pt&, const Pt&)>;
using PointFn = std::function<double(const Pt&)>;

// Double integral of F(x,y) |x-y|^{-N-sigma} over domA x domB. F must
// vanish at the diagonal fast enough to make the integrand integrable;
// divergence under grading raises QuadratureSingularity.
double pair_integral(const PairFn& F, const Region& domA, const Region& domB, double sigma,
                     const QuadConfig& cfg, const PartitionSpec& part,
                     SummationMode sum = SummationMode::Kahan);

// Single integral over a region.
double region_integral(const PointFn& f, const Region& region, const QuadConfig& cfg,
                       const PartitionSpec& part, SummationMode sum = SummationMode::Kahan);

// Region measure through the same cells/weights as region_integral, so that
// means of constants are exact.
double region_measure_quad(const Region& region, const QuadConfig& cfg,
                           const PartitionSpec& part);

// Mean value (u)_{region} with numerator and denominator on identical
// quadrature weights.
double region_mean(const PointFn& f, const Region& region, const QuadConfig& cfg,
                   const PartitionSpec& part);

// Integral of f over R^N minus the ball B_R(x0), where f is given by grid
// data inside the truncation box [-L,L]^N and by far_field beyond it.
// decay_power bounds |f(y)| <= C |y|^{-decay_power} for large |y| and
// drives the dyadic-frame truncation.
double integral_outside_ball(int dim, const Pt& x0, double R, double Lbox, const PointFn& f_inbox,
                             const PointFn& f_far, double decay_power, const QuadConfig& cfg,
                             const PartitionSpec& part);

// Same with a general excluded region (ball or box).
double integral_outside_region(int dim, const Region& excl, double Lbox, const PointFn& f_inbox,
                               const PointFn& f_far, double decay_power, const QuadConfig& cfg,
                               const PartitionSpec& part);

// Closed-form or adaptive value of
//   int_{R^N \ B_R(x0)} |y|^growth |x0-y|^{-N-sigma} dy.
// Exact power-law evaluation when x0 = 0 or growth = 0; adaptive dyadic
// frames otherwise. Requires growth < sigma.
double exterior_radial_integral(int dim, const Pt& x0, double R, double sigma, double growth,
                                const QuadConfig& cfg);

// Principal-value evaluation of the double-phase operator at a grid node:
//   L u(x) = 2 PV int a(x,y,u(x),u(y)) [u(x)-u(y)]^{p-1} |x-y|^{-N-ps} dy
//          + 2 PV int b(x,y) [u(x)-u(y)]^{q-1} |x-y|^{-N-qt} dy.
// The PV is realized by symmetric pairing around x; within one cell of x
// the interpolant is replaced by the C^1 quadratic through the neighboring
// nodes so the symmetrized integrand is absolutely integrable.
double pv_point_eval(const GridFunction& u, const KernelPair& kernel, const ProblemSpec& spec,
                     const Pt& x, const QuadConfig& cfg);

}  // namespace nldp
