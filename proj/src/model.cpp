#include "nldp/model.hpp"

#include <algorithm>
#include <sstream>

namespace nldp {

namespace {

[[noreturn]] void reject(const std::string& msg) { throw ValidationError(msg); }

}  // namespace

DerivedExponents validate_spec(const ProblemSpec& spec, Regime require) {
  const double p = spec.p, q = spec.q, s = spec.s, t = spec.t;
  const int N = spec.dim;

  if (N != 1 && N != 2) reject("dimension must be 1 or 2");
  if (!(p >= 2.0)) reject("p < 2 violates the superquadratic hypothesis 2 <= p");
  if (!(q >= p)) reject("q < p violates the phase ordering p <= q");
  if (!(s > 0.0 && s < 1.0)) reject("s outside (0,1)");
  if (!(t > 0.0 && t < 1.0)) reject("t outside (0,1)");
  if (!(spec.lambda >= 1.0)) reject("Lambda < 1: ellipticity constant must satisfy Lambda >= 1");
  if (!(spec.gamma > 1.0)) reject("gamma must lie in (1, infinity]");
  if (!(spec.delta0 > 0.0)) reject("delta0 must be positive");
  if (!(spec.p_sob_sentinel > q)) reject("Sobolev sentinel must exceed q");

  DerivedExponents d;
  d.p_prime = spec.p_prime();

  const double sp = s * p;
  if (sp < N) {
    d.p_star = N * d.p_prime / (N + s * d.p_prime);
    d.frakA = 0.0;
  } else {
    d.p_star = 1.0;
    d.frakA = 0.5 * std::min(spec.delta0, 1.0 / p);
  }

  d.p_sob = (N > sp) ? N * p / (N - sp) : spec.p_sob_sentinel;

  const double n_over_gamma = std::isinf(spec.gamma) ? 0.0 : N / spec.gamma;
  d.theta = std::min({(sp - n_over_gamma) / (p - 1.0), q * t / (q - 1.0), 1.0});

  d.qt_le_ps = (q * t <= sp);
  d.holder_regime = (q < std::min(d.p_sob, sp / t));
  d.gamma_admissible = (spec.gamma > std::max(1.0, N / sp));

  if (require == Regime::SelfImproving || require == Regime::Holder) {
    if (!d.qt_le_ps) reject("qt > ps violates the self-improving regime q t <= p s");
  }
  if (require == Regime::Holder) {
    if (!d.holder_regime) {
      std::ostringstream os;
      os << "q = " << q << " violates the Holder regime q < min{p_s^*, ps/t} = "
         << std::min(d.p_sob, sp / t);
      reject(os.str());
    }
    if (!d.gamma_admissible) reject("gamma <= max{1, N/(ps)} violates the forcing hypothesis");
    if (!(d.theta > 0.0)) reject("Holder ceiling Theta is non-positive");
  }
  return d;
}

double monotonicity_constant(double ell, int trials, std::mt19937_64& rng) {
  if (ell < 2.0) throw std::invalid_argument("monotonicity_constant requires ell >= 2");
  if (trials < 1000) throw std::invalid_argument("monotonicity_constant requires trials >= 1000");
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  double inf = std::numeric_limits<double>::infinity();
  int used = 0;
  while (used < trials) {
    const double xi = unif(rng), zeta = unif(rng);
    if (xi == zeta) continue;  // degenerate sample, redraw
    const double num = (bracket_power(xi, ell) - bracket_power(zeta, ell)) * (xi - zeta);
    const double ratio = num / std::pow(std::abs(xi - zeta), ell);
    inf = std::min(inf, ratio);
    ++used;
  }
  // The infimum is approached at zeta = -xi; include that configuration.
  for (double xi : {0.5, 1.0, 2.0, 7.5}) {
    const double num = (bracket_power(xi, ell) - bracket_power(-xi, ell)) * (2.0 * xi);
    inf = std::min(inf, num / std::pow(2.0 * xi, ell));
  }
  return inf;
}

double kkp2_constant(double ell, int trials, std::mt19937_64& rng) {
  if (ell < 2.0) throw std::invalid_argument("kkp2_constant requires ell >= 2");
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  double c = 0.0;
  for (int k = 0; k < trials; ++k) {
    const double xi = unif(rng), zeta = unif(rng), w = unif(rng);
    if (xi == zeta) continue;
    const double lhs = std::abs(bracket_power(xi - w, ell) - bracket_power(zeta - w, ell));
    const double den = std::pow(std::abs(xi - zeta), ell - 1.0) +
                       std::abs(xi - zeta) * std::pow(std::abs(xi - w), ell - 2.0);
    if (den == 0.0) continue;
    c = std::max(c, lhs / den);
  }
  return c;
}

double iteration_lemma_constant(double eta, double alpha) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  // phi(t1) <= eta^k phi(r_k) + M sum eta^i (r_{i+1}-r_i)^{-alpha} along the
  // geometric sequence r_i = t1 + (1-tau^i)(t2-t1); optimize over tau.
  double best = std::numeric_limits<double>::infinity();
  const double tau_min = std::pow(eta, 1.0 / alpha);
  for (int i = 1; i < 200; ++i) {
    const double tau = tau_min + (1.0 - tau_min) * i / 200.0;
    const double geom = eta / std::pow(tau, alpha);
    if (geom >= 1.0) continue;
    best = std::min(best, 1.0 / (std::pow(1.0 - tau, alpha) * (1.0 - geom)));
  }
  return best;
}

}  // namespace nldp
