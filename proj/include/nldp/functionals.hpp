#pragma once

#include <cstdint>
#include <optional>

#include "nldp/quadrature.hpp"

namespace nldp {

// Gagliardo seminorm [u]_{W^{s,p}(region)}, optionally b-weighted:
//   ( int int_{region^2} w(x,y) |u(x)-u(y)|^p / |x-y|^{N+sp} dx dy )^{1/p}.
double gagliardo_seminorm(const GridFunction& u, const Region& region, double s_ord, double p_exp,
                          const std::optional<CoefB>& weight, const QuadConfig& cfg,
                          const PartitionSpec& part);

// W_b(x) = int_{R^N \ Omega} b(x,y) |x-y|^{-N-qt} dy.
double wb_weight(const Pt& x, const Region& omega, const CoefB& b, double q_exp, double t_ord,
                 double Lbox, const QuadConfig& cfg, const PartitionSpec& part);

// Component table of the norm on the energy space over a region:
// ||u||_{L^p} + ||u||_{L^q(W_b)} + [u]_{W^{s,p}} + [u]_{W^{t,q}_b}.
struct SpaceNorm {
  double lp = 0.0;
  double lq_wb = 0.0;
  double seminorm_sp = 0.0;
  double seminorm_tq_b = 0.0;
  double total() const { return lp + lq_wb + seminorm_sp + seminorm_tq_b; }
};
SpaceNorm wb_space_norm(const GridFunction& u, const Region& omega, const ProblemSpec& spec,
                        const CoefB& b, const QuadConfig& cfg, const PartitionSpec& part);

struct TailReport {
  double value = 0.0;
  Pt center{0.0, 0.0};
  double radius = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  bool weighted = false;
};

// Nonlocal tail
//   T_{m alpha, b}(u; x0, R)
//     = ( R^{m alpha} sup_x int_{R^N \ B_R(x0)} b(x,y) |u(y)|^{m-1}
//                                    |x0-y|^{-N-m alpha} dy )^{1/(m-1)}.
// The sup is trivial unless b depends on x, in which case it is taken over
// grid nodes (stride-thinned) plus x0.
TailReport nonlocal_tail(const GridFunction& u, const Pt& x0, double R, double m, double alpha_ord,
                         const std::optional<CoefB>& b, bool b_x_dependent, const QuadConfig& cfg,
                         const PartitionSpec& part, int sup_stride = 8);

// Combined two-phase tail
//   T(v; x0, R) = int_{R^N \ B_R(x0)} ( |v(y)|^{p-1} |x0-y|^{-N-sp}
//                + bsup |v(y)|^{q-1} |x0-y|^{-N-tq} ) dy,
// where v = u - shift.
double combined_tail(const GridFunction& u, double shift, const Pt& x0, double R,
                     const ProblemSpec& spec, double b_sup, const QuadConfig& cfg,
                     const PartitionSpec& part);

// mu(B(x0,R) x B(x0,R)) with d mu = |x-y|^{-N+eps p} dx dy.
double mu_measure(const Pt& x0, double R, double epsilon, double p_exp, int dim,
                  const QuadConfig& cfg, const PartitionSpec& part);

// Exact 1D value, used as an oracle in tests.
inline double mu_measure_exact_1d(double R, double epsilon, double p_exp) {
  const double b = epsilon * p_exp;
  return 2.0 * std::pow(2.0 * R, 1.0 + b) / (b * (1.0 + b));
}

// The dual-pair field built on top of a solution u, forcing f and the
// coefficient b: per-pair quantities U, B, H, G, F and the derived
// exponents of the higher-integrability machinery.
class DualPairField {
 public:
  DualPairField(const ProblemSpec& spec, const DerivedExponents& derived, const GridFunction& u,
                const GridFunction& f, CoefB b, Region omega, double epsilon);

  // Default epsilon = 0.9 min{s/p, 1-s}.
  static double default_epsilon(const ProblemSpec& spec) {
    return 0.9 * std::min(spec.s / spec.p, 1.0 - spec.s);
  }

  double epsilon() const { return eps_; }
  double m() const { return m_; }
  double tau() const { return tau_; }
  double alpha() const { return alpha_; }
  double theta_exp() const { return theta_; }
  double beta(int i) const { return std::pow(2.0, i * (-sp_ / (p_ - 1.0) + s_ + eps_)); }

  double U(const Pt& x, const Pt& y) const {
    const double r = dist(x, y, dim_);
    return std::abs(u_.eval(x) - u_.eval(y)) * std::pow(r, -(s_ + eps_));
  }
  double Bw(const Pt& x, const Pt& y) const {
    const double r = dist(x, y, dim_);
    return b_(x, y) * std::pow(r, (s_ - t_) * q_ + eps_ * (q_ - p_));
  }
  double H(const Pt& x, const Pt& y) const {
    const double u = U(x, y);
    return std::pow(u, p_) + Bw(x, y) * std::pow(u, q_);
  }
  double G(const Pt& x, const Pt& y) const { return std::pow(H(x, y), 1.0 / pprime_); }
  double F(const Pt& x, const Pt& y) const {
    if (!omega_.contains(x) || !omega_.contains(y)) return 0.0;
    return std::abs(f_.eval(x));
  }

  const GridFunction& u() const { return u_; }
  const GridFunction& f() const { return f_; }
  const Region& omega() const { return omega_; }
  const ProblemSpec& spec() const { return spec_; }
  const DerivedExponents& derived() const { return derived_; }

  // mu-average of G^e over the product ball B(x,R)^2.
  double average_G_pow(const Pt& x, double R, double e, const QuadConfig& cfg,
                       const PartitionSpec& part) const;
  // mu-average of F^e over the product ball.
  double average_F_pow(const Pt& x, double R, double e, const QuadConfig& cfg,
                       const PartitionSpec& part) const;

 private:
  ProblemSpec spec_;
  DerivedExponents derived_;
  GridFunction u_;
  GridFunction f_;
  CoefB b_;
  Region omega_;
  int dim_;
  double eps_, m_, tau_, alpha_, theta_;
  double p_, q_, s_, t_, sp_, pprime_;
};

// Refined tail
//   Tail(x,R) = sum_{i=0}^{l} beta_i^{p-1} ( avg_{2^i B} G^{p' alpha} dmu )^{1/(p' alpha)}
//             + eps^{1/p'} [eps mu(B(x,R))]^theta T(u - (u)_{2^l R, x}; x, 2^l R),
// with rho0/2 <= 2^l R < rho0 for the enclosing ball.
double refined_tail(const DualPairField& field, const Pt& x, double R, int l, double rho0,
                    double b_sup, const QuadConfig& cfg, const PartitionSpec& part);

// Xi_0 = Upsilon(x0, 2 rho0) + Psi_1(x0, 2 rho0) + T(u-(u)_{2rho0,x0}; x0, 2rho0).
struct Xi0Report {
  double upsilon = 0.0;
  double psi = 0.0;
  double tail = 0.0;
  double total() const { return upsilon + psi + tail; }
};
Xi0Report xi0(const DualPairField& field, const Pt& x0, double rho0, double b_sup, double delta_f,
              const QuadConfig& cfg, const PartitionSpec& part);

// Default delta_f for Upsilon's exponent p* + frakA + delta_f.
inline double default_delta_f(const ProblemSpec& spec) {
  return std::min(0.5 * spec.delta0, 0.5 / (spec.p - 1.0));
}

struct VmoSampling {
  int centers = 16;       // sampled ball-center pairs per radius
  int radii = 5;          // dyadic radii per call
  int value_lattice = 3;  // per-axis lattice size over [-M, M]
  std::uint64_t seed = 12345;
};

// Sampled VMO modulus nu_{a,M}(rho): sup over value pairs in [-M,M]^2,
// dyadic radii r <= rho anchored at the region radius, and sampled center
// pairs, of the mean oscillation of a over B_r(x) x B_r(y). Center samples
// are a deterministic function of (seed, radius index), so the result is
// nondecreasing in rho by construction.
double vmo_modulus(const KernelPair& kernel, const Region& region, double rho, double M,
                   const VmoSampling& sampling, const QuadConfig& cfg);

// Same machinery for a plain (x,y) coefficient.
double vmo_modulus_xy(const CoefB& coef, const Region& region, double rho,
                      const VmoSampling& sampling, const QuadConfig& cfg);

// VMO modulus of the composed coefficient A(x,y) = a(x,y,u(x),u(y)).
double composed_vmo_modulus(const KernelPair& kernel, const GridFunction& u, const Region& region,
                            double rho, const VmoSampling& sampling, const QuadConfig& cfg);

}  // namespace nldp
