#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace nldp {

// Raised when a problem specification violates a structural hypothesis.
// The message names the hypothesis that failed.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kGammaInfinity = std::numeric_limits<double>::infinity();

// Exponents and structural parameters of the double-phase operator
//   (-Delta)^s_{p,a} + b-weighted (-Delta)^t_q,
// together with the forcing integrability gamma and the margin delta0.
struct ProblemSpec {
  double p = 2.0;       // growth exponent of the leading phase, >= 2
  double q = 2.0;       // growth exponent of the b-phase, >= p
  double s = 0.5;       // differentiability order of the leading phase
  double t = 0.5;       // differentiability order of the b-phase
  double lambda = 1.0;  // ellipticity bound for a, degeneracy bound for b
  double gamma = kGammaInfinity;  // integrability exponent of the forcing
  double delta0 = 0.5;  // higher-integrability margin of the forcing
  int dim = 1;          // spatial dimension, 1 or 2

  // Sentinel used for the Sobolev conjugate when N <= p s; configurable
  // because the theory only requires "arbitrarily large".
  double p_sob_sentinel = 1.0e6;

  double p_prime() const { return p / (p - 1.0); }
  double q_prime() const { return q / (q - 1.0); }
};

struct DerivedExponents {
  double p_star = 0.0;   // lower integrability exponent for the forcing
  double frakA = 0.0;    // adjustment added to p_star when s p >= N
  double p_sob = 0.0;    // fractional Sobolev conjugate of p
  double theta = 0.0;    // Holder ceiling
  double p_prime = 0.0;  // conjugate exponent of p

  // Regime flags.
  bool qt_le_ps = false;      // q t <= p s
  bool holder_regime = false; // q < min{p_sob, p s / t}
  bool gamma_admissible = false;  // gamma > max{1, N/(p s)}
};

// Structural requirements a caller can assert during validation.
enum class Regime { None, SelfImproving, Holder };

// Range checks plus all derived exponents. Throws ValidationError naming
// the violated hypothesis; with a Regime argument also enforces the
// corresponding structural conditions.
DerivedExponents validate_spec(const ProblemSpec& spec, Regime require = Regime::None);

// [xi]^{l-1} = |xi|^{l-2} xi, the odd power used throughout.
inline double bracket_power(double xi, double ell) {
  if (xi == 0.0) return 0.0;
  return std::pow(std::abs(xi), ell - 2.0) * xi;
}

// Empirical infimum of ([xi]^{l-1}-[zeta]^{l-1})(xi-zeta)/|xi-zeta|^l over
// random pairs. Strictly positive for l >= 2; exactly 1 for l = 2.
double monotonicity_constant(double ell, int trials, std::mt19937_64& rng);

// Fitted constant c(l) for
//   |[xi-w]^{l-1} - [zeta-w]^{l-1}| <= c |xi-zeta|^{l-1} + c |xi-zeta||xi-w|^{l-2},
// taken as the sample supremum of the ratio over random triples.
double kkp2_constant(double ell, int trials, std::mt19937_64& rng);

// Iteration lemma: if phi(r) <= eta phi(rho) + M/(rho-r)^alpha on
// [t1, t2] with eta in (0,1), then phi(t1) <= c(eta, alpha) M/(t2-t1)^alpha.
double iteration_lemma_constant(double eta, double alpha);
inline double iteration_lemma_bound(double eta, double alpha, double M, double t1, double t2) {
  return iteration_lemma_constant(eta, alpha) * M / std::pow(t2 - t1, alpha);
}

}  // namespace nldp
