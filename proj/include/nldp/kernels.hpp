#pragma once

#include <functional>
#include <random>
#include <string>

#include "nldp/geometry.hpp"
#include "nldp/grid.hpp"

namespace nldp {

using CoefA = std::function<double(const Pt&, const Pt&, double, double)>;
using CoefB = std::function<double(const Pt&, const Pt&)>;
using FrozenCoef = std::function<double(const Pt&, const Pt&)>;

// The two kernel coefficients a(x,y,w,z) and b(x,y) with the structural
// metadata the estimates rely on: ellipticity/degeneracy bounds, symmetry,
// and the continuity modulus of a in the value slots.
struct KernelPair {
  CoefA a;
  CoefB b;
  std::function<double(double)> omega_a;  // global modulus; M-restriction kept as metadata
  double lambda = 1.0;                    // Lambda^-1 <= a <= Lambda, 0 <= b <= Lambda
  double b_sup = 0.0;                     // declared sup of b (<= lambda)
  bool a_value_dependent = false;
  bool b_x_dependent = false;
  bool symmetry_declared = true;

  static KernelPair constant(double a_val, double b_val) {
    KernelPair k;
    k.a = [a_val](const Pt&, const Pt&, double, double) { return a_val; };
    k.b = [b_val](const Pt&, const Pt&) { return b_val; };
    k.omega_a = [](double) { return 0.0; };
    k.lambda = std::max({a_val, b_val, a_val > 0.0 ? 1.0 / a_val : 1.0, 1.0});
    k.b_sup = b_val;
    return k;
  }

  // Composed coefficient A(x,y) = a(x,y,u(x),u(y)).
  FrozenCoef frozen_at(const GridFunction& u) const {
    auto acopy = a;
    return [acopy, u](const Pt& x, const Pt& y) { return acopy(x, y, u.eval(x), u.eval(y)); };
  }
};

struct SpotCheckReport {
  bool bounds_ok = true;
  bool symmetry_ok = true;
  bool modulus_ok = true;
  double worst_bound_violation = 0.0;
  double worst_symmetry_gap = 0.0;
  double worst_modulus_excess = 0.0;
};

// Random-sample verification of (A1)-(A3) on a region; values drawn from
// [-M, M]. Purely diagnostic: the declared metadata stays authoritative.
SpotCheckReport spot_check_kernel(const KernelPair& k, const Region& region, double M,
                                  int samples, std::mt19937_64& rng);

}  // namespace nldp
