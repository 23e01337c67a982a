#include "nldp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "nldp/detail/gauss.hpp"

namespace nldp {

namespace {

void subdivide_clip(const Box& b, const Region& region, int depth, std::vector<QCell>& out) {
  const BoxLocation loc = classify_box(b, region);
  if (loc == BoxLocation::Outside) return;
  if (loc == BoxLocation::Inside) {
    out.push_back({b, false});
    return;
  }
  if (depth <= 0) {
    out.push_back({b, true});
    return;
  }
  const Pt c = b.center();
  if (region.dim == 1) {
    subdivide_clip({{b.lo[0], 0.0}, {c[0], 0.0}}, region, depth - 1, out);
    subdivide_clip({{c[0], 0.0}, {b.hi[0], 0.0}}, region, depth - 1, out);
    return;
  }
  subdivide_clip({{b.lo[0], b.lo[1]}, {c[0], c[1]}}, region, depth - 1, out);
  subdivide_clip({{c[0], b.lo[1]}, {b.hi[0], c[1]}}, region, depth - 1, out);
  subdivide_clip({{b.lo[0], c[1]}, {c[0], b.hi[1]}}, region, depth - 1, out);
  subdivide_clip({{c[0], c[1]}, {b.hi[0], b.hi[1]}}, region, depth - 1, out);
}

}  // namespace

std::vector<QCell> partition_region(const Region& region, const PartitionSpec& part) {
  std::vector<QCell> cells;
  const Box bb = region.bounding_box();
  const double h = part.cell_size;
  if (!(h > 0.0)) throw std::invalid_argument("partition_region: cell_size must be positive");

  // Per-axis breakpoints, aligned to origin + k*h when requested. Region
  // edges are inserted exactly, so 1D regions are cut without clipping.
  std::array<std::vector<double>, 2> ticks;
  for (int d = 0; d < region.dim; ++d) {
    std::vector<double>& t = ticks[d];
    const double lo = bb.lo[d], hi = bb.hi[d];
    t.push_back(lo);
    if (part.align) {
      const long k0 = static_cast<long>(std::ceil((lo - part.origin) / h - 1e-12));
      for (long k = k0;; ++k) {
        const double x = part.origin + k * h;
        if (x >= hi - 1e-12 * h) break;
        if (x > lo + 1e-12 * h) t.push_back(x);
      }
    } else {
      const int m = std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-12)));
      for (int k = 1; k < m; ++k) t.push_back(lo + (hi - lo) * k / m);
    }
    t.push_back(hi);
  }

  const bool ball2d = (region.dim == 2 && region.kind == RegionKind::Ball);
  const std::size_t n0 = ticks[0].size() - 1;
  const std::size_t n1 = (region.dim == 2) ? ticks[1].size() - 1 : 1;
  for (std::size_t j = 0; j < n1; ++j)
    for (std::size_t i = 0; i < n0; ++i) {
      Box b;
      b.lo[0] = ticks[0][i];
      b.hi[0] = ticks[0][i + 1];
      if (region.dim == 2) {
        b.lo[1] = ticks[1][j];
        b.hi[1] = ticks[1][j + 1];
      }
      if (!ball2d) {
        cells.push_back({b, false});
        continue;
      }
      subdivide_clip(b, region, part.clip_depth, cells);
    }
  return cells;
}

double pair_integral(const PairFn& F, const Region& domA, const Region& domB, double sigma,
                     const QuadConfig& cfg, const PartitionSpec& part, SummationMode sum) {
  const int dim = domA.dim;
  const auto cellsA = partition_region(domA, part);
  const auto cellsB = partition_region(domB, part);

  Accumulator acc(sum);
  for (const auto& ca : cellsA) {
    for (const auto& cb : cellsB) {
      const bool need_clip = ca.clip || cb.clip;
      auto visit = [&](const Pt& x, const Pt& y, double w) -> double {
        if (need_clip && (!domA.contains(x) || !domB.contains(y))) return 0.0;
        const double v = F(x, y) * w;
        acc.add(v);
        return v;
      };
      detail::PairEngine<decltype(visit)> engine(dim, sigma, cfg, visit);
      engine.box_pair(ca.box, cb.box);
    }
  }
  return acc.value();
}

namespace {

double gauss_cell(const PointFn& f, const QCell& cell, const Region& region, int dim, int g) {
  const detail::GaussRule rule = detail::gauss_rule(g);
  double s = 0.0;
  if (dim == 1) {
    const double c = 0.5 * (cell.box.lo[0] + cell.box.hi[0]), h = 0.5 * cell.box.side(0);
    for (int i = 0; i < rule.n; ++i) {
      const Pt x{c + h * rule.x[i], 0.0};
      if (cell.clip && !region.contains(x)) continue;
      s += h * rule.w[i] * f(x);
    }
    return s;
  }
  const double c0 = 0.5 * (cell.box.lo[0] + cell.box.hi[0]), h0 = 0.5 * cell.box.side(0);
  const double c1 = 0.5 * (cell.box.lo[1] + cell.box.hi[1]), h1 = 0.5 * cell.box.side(1);
  for (int i = 0; i < rule.n; ++i)
    for (int j = 0; j < rule.n; ++j) {
      const Pt x{c0 + h0 * rule.x[i], c1 + h1 * rule.x[j]};
      if (cell.clip && !region.contains(x)) continue;
      s += h0 * h1 * rule.w[i] * rule.w[j] * f(x);
    }
  return s;
}

}  // namespace

double region_integral(const PointFn& f, const Region& region, const QuadConfig& cfg,
                       const PartitionSpec& part, SummationMode sum) {
  const auto cells = partition_region(region, part);
  Accumulator acc(sum);
  for (const auto& c : cells) acc.add(gauss_cell(f, c, region, region.dim, cfg.gauss));
  return acc.value();
}

double region_measure_quad(const Region& region, const QuadConfig& cfg,
                           const PartitionSpec& part) {
  return region_integral([](const Pt&) { return 1.0; }, region, cfg, part);
}

double region_mean(const PointFn& f, const Region& region, const QuadConfig& cfg,
                   const PartitionSpec& part) {
  const double vol = region_measure_quad(region, cfg, part);
  if (vol <= 0.0) throw std::invalid_argument("region_mean: degenerate region");
  return region_integral(f, region, cfg, part) / vol;
}

namespace {

// Gauss integral over box minus an excluded region. 1D complements are cut
// exactly; 2D ball boundaries fall back to subdivision plus indicator.
double cell_minus_region(const PointFn& f, const Box& b, const Region& excl, int dim, int g,
                         int depth) {
  const BoxLocation loc = classify_box(b, excl);
  if (loc == BoxLocation::Inside) return 0.0;
  const detail::GaussRule rule = detail::gauss_rule(g);
  if (loc == BoxLocation::Outside || dim == 1) {
    double s = 0.0;
    if (dim == 1) {
      // Exact complement segments within [lo, hi].
      const double elo = excl.center[0] - excl.radius, ehi = excl.center[0] + excl.radius;
      const double segs[2][2] = {{b.lo[0], std::min(b.hi[0], elo)},
                                 {std::max(b.lo[0], ehi), b.hi[0]}};
      for (const auto& sg : segs) {
        if (loc == BoxLocation::Outside) {
          // No exclusion inside this box.
          if (sg[0] != b.lo[0]) continue;  // take the whole box once
          const double c = 0.5 * (b.lo[0] + b.hi[0]), h = 0.5 * b.side(0);
          for (int i = 0; i < rule.n; ++i) s += h * rule.w[i] * f({c + h * rule.x[i], 0.0});
          break;
        }
        if (sg[0] >= sg[1]) continue;
        const double c = 0.5 * (sg[0] + sg[1]), h = 0.5 * (sg[1] - sg[0]);
        for (int i = 0; i < rule.n; ++i) s += h * rule.w[i] * f({c + h * rule.x[i], 0.0});
      }
      return s;
    }
    const double c0 = 0.5 * (b.lo[0] + b.hi[0]), h0 = 0.5 * b.side(0);
    const double c1 = 0.5 * (b.lo[1] + b.hi[1]), h1 = 0.5 * b.side(1);
    double s = 0.0;
    for (int i = 0; i < rule.n; ++i)
      for (int j = 0; j < rule.n; ++j) {
        const Pt x{c0 + h0 * rule.x[i], c1 + h1 * rule.x[j]};
        s += h0 * h1 * rule.w[i] * rule.w[j] * f(x);
      }
    return s;
  }
  // 2D boundary box.
  if (depth > 0) {
    const Pt c = b.center();
    double s = 0.0;
    s += cell_minus_region(f, {{b.lo[0], b.lo[1]}, {c[0], c[1]}}, excl, dim, g, depth - 1);
    s += cell_minus_region(f, {{c[0], b.lo[1]}, {b.hi[0], c[1]}}, excl, dim, g, depth - 1);
    s += cell_minus_region(f, {{b.lo[0], c[1]}, {c[0], b.hi[1]}}, excl, dim, g, depth - 1);
    s += cell_minus_region(f, {{c[0], c[1]}, {b.hi[0], b.hi[1]}}, excl, dim, g, depth - 1);
    return s;
  }
  const double c0 = 0.5 * (b.lo[0] + b.hi[0]), h0 = 0.5 * b.side(0);
  const double c1 = 0.5 * (b.lo[1] + b.hi[1]), h1 = 0.5 * b.side(1);
  double s = 0.0;
  for (int i = 0; i < rule.n; ++i)
    for (int j = 0; j < rule.n; ++j) {
      const Pt x{c0 + h0 * rule.x[i], c1 + h1 * rule.x[j]};
      if (excl.contains(x)) continue;
      s += h0 * h1 * rule.w[i] * rule.w[j] * f(x);
    }
  return s;
}

// Dyadic frame between sup-norm radii [r, 2r], as boxes.
std::vector<Box> frame_boxes(int dim, double r) {
  if (dim == 1) return {{{r, 0.0}, {2.0 * r, 0.0}}, {{-2.0 * r, 0.0}, {-r, 0.0}}};
  return {{{r, -r}, {2.0 * r, r}},        {{-2.0 * r, -r}, {-r, r}},
          {{-r, r}, {r, 2.0 * r}},        {{-r, -2.0 * r}, {r, -r}},
          {{r, r}, {2.0 * r, 2.0 * r}},   {{-2.0 * r, r}, {-r, 2.0 * r}},
          {{r, -2.0 * r}, {2.0 * r, -r}}, {{-2.0 * r, -2.0 * r}, {-r, -r}}};
}

}  // namespace

double integral_outside_region(int dim, const Region& excl, double Lbox, const PointFn& f_inbox,
                               const PointFn& f_far, double decay_power, const QuadConfig& cfg,
                               const PartitionSpec& part) {
  Accumulator acc(SummationMode::Kahan);

  // Part 1: truncation box minus the excluded region, on aligned cells.
  const Region box_region = Region::box({0.0, 0.0}, Lbox, dim);
  for (const auto& cell : partition_region(box_region, part))
    acc.add(cell_minus_region(f_inbox, cell.box, excl, dim, cfg.gauss, part.clip_depth + 4));

  // Part 2: dyadic frames beyond the box, until contributions are negligible
  // or the declared decay certifies the remainder is below double precision.
  double r = Lbox;
  for (int k = 0; k < 400; ++k) {
    double frame = 0.0;
    for (const Box& b : frame_boxes(dim, r))
      frame += cell_minus_region(f_far, b, excl, dim, std::min(cfg.gauss + 1, 6), 6);
    acc.add(frame);
    r *= 2.0;
    const double scale = std::abs(acc.value());
    if (std::abs(frame) <= 1e-15 * scale + 1e-300 && k >= 2) break;
    if (decay_power > dim && k >= 2) {
      const double q = std::pow(2.0, dim - decay_power);
      const double rem = std::abs(frame) * q / (1.0 - q);
      if (rem <= 1e-15 * scale + 1e-300) break;
    }
  }
  return acc.value();
}

double integral_outside_ball(int dim, const Pt& x0, double R, double Lbox, const PointFn& f_inbox,
                             const PointFn& f_far, double decay_power, const QuadConfig& cfg,
                             const PartitionSpec& part) {
  if (!(R > 0.0)) throw std::invalid_argument("integral_outside_ball: R must be positive");
  return integral_outside_region(dim, Region::ball(x0, R, dim), Lbox, f_inbox, f_far, decay_power,
                                 cfg, part);
}

double exterior_radial_integral(int dim, const Pt& x0, double R, double sigma, double growth,
                                const QuadConfig& cfg) {
  if (!(growth < sigma))
    throw std::invalid_argument(
        "exterior_radial_integral: divergent tail, growth exponent must satisfy kappa(m-1) < "
        "sigma");
  if (!(R > 0.0)) throw std::invalid_argument("exterior_radial_integral: R must be positive");
  const double surface = (dim == 1) ? 2.0 : 2.0 * M_PI;
  if (norm(x0, dim) == 0.0 || growth == 0.0) {
    // int_{|y-x0|>R} |y-x0|^{growth-N-sigma} dy in polar form; for growth=0
    // the |y| factor is absent so centering is irrelevant.
    return surface * std::pow(R, growth - sigma) / (sigma - growth);
  }
  // Off-center with growth: dyadic shells around x0, Gauss in radius and
  // midpoint rule in angle.
  const detail::GaussRule rule = detail::gauss_rule(6);
  double acc = 0.0;
  double r = R;
  for (int k = 0; k < 300; ++k) {
    double shell = 0.0;
    for (int i = 0; i < rule.n; ++i) {
      const double rad = 1.5 * r + 0.5 * r * rule.x[i];
      const double wr = 0.5 * r * rule.w[i];
      if (dim == 1) {
        for (double sgn : {-1.0, 1.0}) {
          const Pt y{x0[0] + sgn * rad, 0.0};
          shell += wr * std::pow(std::abs(y[0]), growth) * std::pow(rad, -(1.0 + sigma));
        }
      } else {
        const int na = 16;
        for (int a = 0; a < na; ++a) {
          const double th = 2.0 * M_PI * (a + 0.5) / na;
          const Pt y{x0[0] + rad * std::cos(th), x0[1] + rad * std::sin(th)};
          shell += wr * (2.0 * M_PI / na) * rad * std::pow(norm(y, 2), growth) *
                   std::pow(rad, -(2.0 + sigma));
        }
      }
    }
    acc += shell;
    r *= 2.0;
    if (std::abs(shell) <= 1e-14 * std::abs(acc) && k >= 3) break;
  }
  return acc;
}

double pv_point_eval(const GridFunction& u, const KernelPair& kernel, const ProblemSpec& spec,
                     const Pt& x, const QuadConfig& cfg) {
  const int dim = u.dim();
  const double h = u.spacing();
  const double L = u.box_halfwidth();

  int idx[2] = {0, 0};
  for (int d = 0; d < dim; ++d) {
    const double t = (x[d] + L) / h;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9) throw std::domain_error("pv_point_eval: x must be a grid node");
    idx[d] = static_cast<int>(r);
    if (idx[d] < 1 || idx[d] > u.cells_per_axis() - 1)
      throw std::domain_error("pv_point_eval: x must be interior to the truncation box");
  }

  const double ux = u.eval(x);

  // Local C^1 model: quadratic through the neighboring nodes, used inside
  // the one-cell square around x in place of the kinked interpolant.
  double grad[2] = {0.0, 0.0}, curv[2] = {0.0, 0.0};
  for (int d = 0; d < dim; ++d) {
    Pt xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    const double up = u.eval(xp), um = u.eval(xm);
    grad[d] = (up - um) / (2.0 * h);
    curv[d] = (up - 2.0 * ux + um) / (h * h);
  }
  double cross = 0.0;
  if (dim == 2) {
    cross = (u.eval({x[0] + h, x[1] + h}) - u.eval({x[0] + h, x[1] - h}) -
             u.eval({x[0] - h, x[1] + h}) + u.eval({x[0] - h, x[1] - h})) /
            (4.0 * h * h);
  }
  auto local = [&](const double z[2]) {
    double v = ux;
    for (int d = 0; d < dim; ++d) v += grad[d] * z[d] + 0.5 * curv[d] * z[d] * z[d];
    if (dim == 2) v += cross * z[0] * z[1];
    return v;
  };

  const double sp = spec.s * spec.p, tq = spec.t * spec.q;
  auto phase_sum = [&](const Pt& y, double uy) {
    const double r = dist(x, y, dim);
    double val = kernel.a(x, y, ux, uy) * bracket_power(ux - uy, spec.p) * std::pow(r, -(dim + sp));
    const double bv = kernel.b(x, y);
    if (bv != 0.0) val += bv * bracket_power(ux - uy, spec.q) * std::pow(r, -(dim + tq));
    return val;
  };

  const detail::GaussRule rule = detail::gauss_rule(cfg.gauss);
  double acc = 0.0;

  // Inner square [-h,h]^N around x: symmetric pairing y <-> 2x-y on dyadic
  // sup-norm shells with the smoothed local model.
  const int shells = 48;
  for (int k = 0; k < shells; ++k) {
    const double r_hi = h * std::pow(0.5, k);
    const double r_lo = 0.5 * r_hi;
    double level = 0.0;
    if (dim == 1) {
      for (int i = 0; i < rule.n; ++i) {
        const double z = 0.5 * (r_lo + r_hi) + 0.5 * (r_hi - r_lo) * rule.x[i];
        const double w = 0.5 * (r_hi - r_lo) * rule.w[i];
        const double zp[2] = {z, 0.0}, zm[2] = {-z, 0.0};
        level += w * (phase_sum({x[0] + z, 0.0}, local(zp)) +
                      phase_sum({x[0] - z, 0.0}, local(zm)));
      }
    } else {
      // Half of the sup-norm annulus; the mirror image comes from pairing.
      const double rects[4][4] = {{r_lo, r_hi, -r_lo, r_lo},
                                  {-r_lo, r_lo, r_lo, r_hi},
                                  {r_lo, r_hi, r_lo, r_hi},
                                  {-r_hi, -r_lo, r_lo, r_hi}};
      for (const auto& rc : rects) {
        const double c0 = 0.5 * (rc[0] + rc[1]), h0 = 0.5 * (rc[1] - rc[0]);
        const double c1 = 0.5 * (rc[2] + rc[3]), h1 = 0.5 * (rc[3] - rc[2]);
        for (int i = 0; i < rule.n; ++i)
          for (int j = 0; j < rule.n; ++j) {
            const double z0 = c0 + h0 * rule.x[i], z1 = c1 + h1 * rule.x[j];
            const double w = h0 * h1 * rule.w[i] * rule.w[j];
            const double zp[2] = {z0, z1}, zm[2] = {-z0, -z1};
            level += w * (phase_sum({x[0] + z0, x[1] + z1}, local(zp)) +
                          phase_sum({x[0] - z0, x[1] - z1}, local(zm)));
          }
      }
    }
    acc += level;
    if (std::abs(level) < 1e-15 * std::abs(acc) && k > 6) break;
  }

  // Box minus the inner square on grid cells, then the closure beyond.
  auto f_mid = [&](const Pt& y) { return phase_sum(y, u.eval(y)); };
  auto f_far = [&](const Pt& y) { return phase_sum(y, u.exterior().eval(y)); };
  const double kap = u.exterior().growth_kappa;
  const double decay =
      dim + std::min(sp - kap * (spec.p - 1.0), tq - kap * (spec.q - 1.0));
  acc += integral_outside_region(dim, Region::box(x, h, dim), L, f_mid, f_far, decay, cfg,
                                 PartitionSpec::for_grid(u));
  return 2.0 * acc;
}

}  // namespace nldp
