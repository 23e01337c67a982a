#include "nldp/kernels.hpp"

namespace nldp {

SpotCheckReport spot_check_kernel(const KernelPair& k, const Region& region, double M,
                                  int samples, std::mt19937_64& rng) {
  SpotCheckReport rep;
  const Box bb = region.bounding_box();
  std::uniform_real_distribution<double> ux(bb.lo[0], bb.hi[0]);
  std::uniform_real_distribution<double> uy(bb.lo[1] == bb.hi[1] ? bb.lo[1] - 1.0 : bb.lo[1],
                                            bb.lo[1] == bb.hi[1] ? bb.hi[1] + 1.0 : bb.hi[1]);
  std::uniform_real_distribution<double> uv(-M, M);

  auto draw_point = [&] {
    Pt p{ux(rng), 0.0};
    if (region.dim == 2) p[1] = uy(rng);
    return p;
  };

  for (int i = 0; i < samples; ++i) {
    const Pt x = draw_point(), y = draw_point();
    const double w = uv(rng), z = uv(rng);
    const double a = k.a(x, y, w, z);
    const double b = k.b(x, y);
    const double lo = 1.0 / k.lambda - 1e-12, hi = k.lambda + 1e-12;
    if (a < lo || a > hi) {
      rep.bounds_ok = false;
      rep.worst_bound_violation = std::max(rep.worst_bound_violation,
                                           std::max(lo - a, a - hi));
    }
    if (b < -1e-12 || b > hi) {
      rep.bounds_ok = false;
      rep.worst_bound_violation = std::max(rep.worst_bound_violation,
                                           std::max(-b, b - hi));
    }
    const double gap_a = std::abs(a - k.a(y, x, z, w));
    const double gap_b = std::abs(b - k.b(y, x));
    rep.worst_symmetry_gap = std::max({rep.worst_symmetry_gap, gap_a, gap_b});
    if (gap_a > 1e-12 || gap_b > 1e-12) rep.symmetry_ok = false;

    const double w2 = uv(rng), z2 = uv(rng);
    const double diff = std::abs(a - k.a(x, y, w2, z2));
    const double bound = k.omega_a(0.5 * (std::abs(w - w2) + std::abs(z - z2)));
    if (diff > bound + 1e-12) {
      rep.modulus_ok = false;
      rep.worst_modulus_excess = std::max(rep.worst_modulus_excess, diff - bound);
    }
  }
  return rep;
}

}  // namespace nldp
