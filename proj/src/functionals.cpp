#include "nldp/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace nldp {

double gagliardo_seminorm(const GridFunction& u, const Region& region, double s_ord, double p_exp,
                          const std::optional<CoefB>& weight, const QuadConfig& cfg,
                          const PartitionSpec& part) {
  auto F = [&](const Pt& x, const Pt& y) {
    const double d = std::pow(std::abs(u.eval(x) - u.eval(y)), p_exp);
    return weight ? (*weight)(x, y) * d : d;
  };
  const double val = pair_integral(F, region, region, s_ord * p_exp, cfg, part);
  return std::pow(std::max(val, 0.0), 1.0 / p_exp);
}

double wb_weight(const Pt& x, const Region& omega, const CoefB& b, double q_exp, double t_ord,
                 double Lbox, const QuadConfig& cfg, const PartitionSpec& part) {
  const int dim = omega.dim;
  const double qt = q_exp * t_ord;
  auto f = [&](const Pt& y) { return b(x, y) * std::pow(dist(x, y, dim), -(dim + qt)); };
  // b is bounded, so the integrand decays like |y|^{-N-qt}.
  return integral_outside_region(dim, omega, Lbox, f, f, dim + qt, cfg, part);
}

SpaceNorm wb_space_norm(const GridFunction& u, const Region& omega, const ProblemSpec& spec,
                        const CoefB& b, const QuadConfig& cfg, const PartitionSpec& part) {
  SpaceNorm n;
  const double p = spec.p, q = spec.q;
  n.lp = std::pow(region_integral([&](const Pt& x) { return std::pow(std::abs(u.eval(x)), p); },
                                  omega, cfg, part),
                  1.0 / p);
  n.seminorm_sp = gagliardo_seminorm(u, omega, spec.s, p, std::nullopt, cfg, part);
  n.seminorm_tq_b = gagliardo_seminorm(u, omega, spec.t, q, b, cfg, part);
  const double L = u.box_halfwidth();
  n.lq_wb = std::pow(region_integral(
                         [&](const Pt& x) {
                           return wb_weight(x, omega, b, q, spec.t, L, cfg, part) *
                                  std::pow(std::abs(u.eval(x)), q);
                         },
                         omega, cfg, part),
                     1.0 / q);
  return n;
}

TailReport nonlocal_tail(const GridFunction& u, const Pt& x0, double R, double m, double alpha_ord,
                         const std::optional<CoefB>& b, bool b_x_dependent, const QuadConfig& cfg,
                         const PartitionSpec& part, int sup_stride) {
  const int dim = u.dim();
  const double ma = m * alpha_ord;
  if (!u.tail_finite(m, alpha_ord))
    throw std::invalid_argument(
        "nonlocal_tail: divergent tail, far-field growth violates (m-1) kappa < m alpha");

  const double kap = u.exterior().growth_kappa;
  const double decay = dim + ma - kap * (m - 1.0);

  auto integral_for = [&](const Pt& xs) {
    auto fin = [&](const Pt& y) {
      const double bv = b ? (*b)(xs, y) : 1.0;
      return bv * std::pow(std::abs(u.eval(y)), m - 1.0) * std::pow(dist(x0, y, dim), -(dim + ma));
    };
    auto ffar = [&](const Pt& y) {
      const double bv = b ? (*b)(xs, y) : 1.0;
      return bv * std::pow(std::abs(u.exterior().eval(y)), m - 1.0) *
             std::pow(dist(x0, y, dim), -(dim + ma));
    };
    return integral_outside_ball(dim, x0, R, u.box_halfwidth(), fin, ffar, decay, cfg, part);
  };

  double sup = integral_for(x0);
  if (b && b_x_dependent) {
    const int stride = std::max(1, sup_stride);
    for (std::size_t i = 0; i < u.node_count(); i += stride)
      sup = std::max(sup, integral_for(u.node_coord(i)));
  }

  TailReport rep;
  rep.value = std::pow(std::max(std::pow(R, ma) * sup, 0.0), 1.0 / (m - 1.0));
  rep.center = x0;
  rep.radius = R;
  rep.m = m;
  rep.alpha = alpha_ord;
  rep.weighted = b.has_value();
  return rep;
}

double combined_tail(const GridFunction& u, double shift, const Pt& x0, double R,
                     const ProblemSpec& spec, double b_sup, const QuadConfig& cfg,
                     const PartitionSpec& part) {
  const int dim = u.dim();
  const double sp = spec.s * spec.p, tq = spec.t * spec.q;
  const double kap = u.exterior().growth_kappa;
  auto term = [&](double val, const Pt& y) {
    const double r = dist(x0, y, dim);
    double out = std::pow(std::abs(val), spec.p - 1.0) * std::pow(r, -(dim + sp));
    if (b_sup != 0.0)
      out += b_sup * std::pow(std::abs(val), spec.q - 1.0) * std::pow(r, -(dim + tq));
    return out;
  };
  auto fin = [&](const Pt& y) { return term(u.eval(y) - shift, y); };
  auto ffar = [&](const Pt& y) { return term(u.exterior().eval(y) - shift, y); };
  const double decay =
      dim + std::min(sp - kap * (spec.p - 1.0), tq - kap * (spec.q - 1.0));
  return integral_outside_ball(dim, x0, R, u.box_halfwidth(), fin, ffar, decay, cfg, part);
}

double mu_measure(const Pt& x0, double R, double epsilon, double p_exp, int dim,
                  const QuadConfig& cfg, const PartitionSpec& part) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mu_measure: epsilon must be positive");
  const Region ball = Region::ball(x0, R, dim);
  return pair_integral([](const Pt&, const Pt&) { return 1.0; }, ball, ball, -epsilon * p_exp, cfg,
                       part);
}

DualPairField::DualPairField(const ProblemSpec& spec, const DerivedExponents& derived,
                             const GridFunction& u, const GridFunction& f, CoefB b, Region omega,
                             double epsilon)
    : spec_(spec),
      derived_(derived),
      u_(u),
      f_(f),
      b_(std::move(b)),
      omega_(omega),
      dim_(spec.dim),
      eps_(epsilon),
      p_(spec.p),
      q_(spec.q),
      s_(spec.s),
      t_(spec.t) {
  if (!(eps_ > 0.0 && eps_ < std::min(s_ / p_, 1.0 - s_)))
    throw std::invalid_argument("DualPairField: epsilon outside (0, min{s/p, 1-s})");
  sp_ = s_ * p_;
  pprime_ = spec.p_prime();
  const double N = dim_;
  m_ = (N * p_ + eps_ * p_ * p_) / (N + sp_ + eps_ * p_);
  tau_ = s_ + eps_ - eps_ * p_ / m_;
  alpha_ = m_ / p_;
  theta_ = (s_ - eps_ * (p_ - 1.0)) / (N + eps_ * p_);
}

double DualPairField::average_G_pow(const Pt& x, double R, double e, const QuadConfig& cfg,
                                    const PartitionSpec& part) const {
  const Region ball = Region::ball(x, R, dim_);
  const double sigma = -eps_ * p_;
  const double mass = pair_integral(
      [&](const Pt& a, const Pt& b2) { return std::pow(G(a, b2), e); }, ball, ball, sigma, cfg,
      part);
  const double mu = pair_integral([](const Pt&, const Pt&) { return 1.0; }, ball, ball, sigma, cfg,
                                  part);
  return mass / mu;
}

double DualPairField::average_F_pow(const Pt& x, double R, double e, const QuadConfig& cfg,
                                    const PartitionSpec& part) const {
  const Region ball = Region::ball(x, R, dim_);
  const double sigma = -eps_ * p_;
  const double mass = pair_integral(
      [&](const Pt& a, const Pt& b2) { return std::pow(F(a, b2), e); }, ball, ball, sigma, cfg,
      part);
  const double mu = pair_integral([](const Pt&, const Pt&) { return 1.0; }, ball, ball, sigma, cfg,
                                  part);
  return mass / mu;
}

double refined_tail(const DualPairField& field, const Pt& x, double R, int l, double rho0,
                    double b_sup, const QuadConfig& cfg, const PartitionSpec& part) {
  const double scale = std::pow(2.0, l) * R;
  if (l < 0 || scale < 0.5 * rho0 - 1e-12 || scale >= rho0 + 1e-12)
    throw std::invalid_argument("refined_tail: l inconsistent with rho0/2 <= 2^l R < rho0");

  const ProblemSpec& spec = field.spec();
  const double pp = spec.p_prime();
  const double pa = pp * field.alpha();

  double dyadic = 0.0;
  for (int i = 0; i <= l; ++i) {
    const double avg = field.average_G_pow(x, std::pow(2.0, i) * R, pa, cfg, part);
    dyadic += std::pow(field.beta(i), spec.p - 1.0) * std::pow(avg, 1.0 / pa);
  }

  const double mu = mu_measure(x, R, field.epsilon(), spec.p, spec.dim, cfg, part);
  const double mean = region_mean([&](const Pt& y) { return field.u().eval(y); },
                                  Region::ball(x, scale, spec.dim), cfg, part);
  const double tail = combined_tail(field.u(), mean, x, scale, spec, b_sup, cfg, part);

  return dyadic + std::pow(field.epsilon(), 1.0 / pp) *
                      std::pow(field.epsilon() * mu, field.theta_exp()) * tail;
}

Xi0Report xi0(const DualPairField& field, const Pt& x0, double rho0, double b_sup, double delta_f,
              const QuadConfig& cfg, const PartitionSpec& part) {
  const ProblemSpec& spec = field.spec();
  const DerivedExponents& der = field.derived();
  const double R = 2.0 * rho0;
  const double pp = spec.p_prime();
  const double psA = der.p_star + der.frakA;

  Xi0Report rep;
  const double ups_e = psA + delta_f;
  rep.upsilon = std::pow(field.average_F_pow(x0, R, ups_e, cfg, part), 1.0 / ups_e);

  const double gavg = field.average_G_pow(x0, R, pp, cfg, part);
  const double favg = field.average_F_pow(x0, R, psA, cfg, part);
  const double mu = mu_measure(x0, R, field.epsilon(), spec.p, spec.dim, cfg, part);
  rep.psi = std::pow(gavg, 1.0 / pp) +
            std::pow(mu, field.theta_exp()) /
                std::pow(field.epsilon(), 1.0 / psA - 1.0 / pp) * std::pow(favg, 1.0 / psA);

  const double mean = region_mean([&](const Pt& y) { return field.u().eval(y); },
                                  Region::ball(x0, R, spec.dim), cfg, part);
  rep.tail = combined_tail(field.u(), mean, x0, R, spec, b_sup, cfg, part);
  return rep;
}

namespace {

// Quadrature nodes and weights of a ball region, reused across the
// oscillation passes.
struct BallQuad {
  std::vector<Pt> pts;
  std::vector<double> wts;
  double mass = 0.0;
};

BallQuad ball_quad(const Region& ball, const QuadConfig& cfg) {
  BallQuad q;
  PartitionSpec part = PartitionSpec::unaligned(ball.radius / 2.0);
  part.clip_depth = 3;
  const auto cells = partition_region(ball, part);
  const detail::GaussRule rule = detail::gauss_rule(std::min(cfg.gauss, 4));
  for (const auto& c : cells) {
    if (ball.dim == 1) {
      const double cc = 0.5 * (c.box.lo[0] + c.box.hi[0]), hh = 0.5 * c.box.side(0);
      for (int i = 0; i < rule.n; ++i) {
        const Pt x{cc + hh * rule.x[i], 0.0};
        if (c.clip && !ball.contains(x)) continue;
        q.pts.push_back(x);
        q.wts.push_back(hh * rule.w[i]);
      }
    } else {
      const double c0 = 0.5 * (c.box.lo[0] + c.box.hi[0]), h0 = 0.5 * c.box.side(0);
      const double c1 = 0.5 * (c.box.lo[1] + c.box.hi[1]), h1 = 0.5 * c.box.side(1);
      for (int i = 0; i < rule.n; ++i)
        for (int j = 0; j < rule.n; ++j) {
          const Pt x{c0 + h0 * rule.x[i], c1 + h1 * rule.x[j]};
          if (c.clip && !ball.contains(x)) continue;
          q.pts.push_back(x);
          q.wts.push_back(h0 * h1 * rule.w[i] * rule.w[j]);
        }
    }
  }
  for (double w : q.wts) q.mass += w;
  return q;
}

// Mean oscillation of a(x',y') over B_r(x) x B_r(y).
double mean_oscillation(const std::function<double(const Pt&, const Pt&)>& a, const Region& bx,
                        const Region& by, const QuadConfig& cfg) {
  const BallQuad qx = ball_quad(bx, cfg);
  const BallQuad qy = ball_quad(by, cfg);
  if (qx.mass <= 0.0 || qy.mass <= 0.0) return 0.0;
  std::vector<double> vals(qx.pts.size() * qy.pts.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < qx.pts.size(); ++i)
    for (std::size_t j = 0; j < qy.pts.size(); ++j) {
      const double v = a(qx.pts[i], qy.pts[j]);
      vals[i * qy.pts.size() + j] = v;
      mean += qx.wts[i] * qy.wts[j] * v;
    }
  mean /= qx.mass * qy.mass;
  double osc = 0.0;
  for (std::size_t i = 0; i < qx.pts.size(); ++i)
    for (std::size_t j = 0; j < qy.pts.size(); ++j)
      osc += qx.wts[i] * qy.wts[j] * std::abs(vals[i * qy.pts.size() + j] - mean);
  return osc / (qx.mass * qy.mass);
}

double vmo_modulus_impl(const std::function<double(const Pt&, const Pt&, double, double)>& a,
                        const Region& region, double rho, double M, const VmoSampling& sampling,
                        const QuadConfig& cfg) {
  if (!(rho > 0.0) || rho > region.radius + 1e-12)
    throw std::invalid_argument("vmo_modulus: rho must lie in (0, region radius]");

  std::vector<double> values;
  if (sampling.value_lattice <= 1 || M == 0.0) {
    values = {0.0};
  } else {
    const int nv = sampling.value_lattice;
    for (int i = 0; i < nv; ++i) values.push_back(-M + 2.0 * M * i / (nv - 1));
  }

  double worst = 0.0;
  // Dyadic radii anchored at the region radius, independent of rho, so the
  // modulus is a running max and monotone in rho.
  int used = 0;
  for (int j = 1; used < sampling.radii && j < 40; ++j) {
    const double r = region.radius * std::pow(0.5, j);
    if (r > rho) continue;
    ++used;
    std::mt19937_64 rng(sampling.seed ^ (0x9e3779b97f4a7c15ull * (j + 1)));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int c = 0; c < sampling.centers; ++c) {
      // Ball centers such that B_r(center) stays inside the region.
      const double reach = region.radius - r;
      Pt cx = region.center, cy = region.center;
      for (int d = 0; d < region.dim; ++d) {
        cx[d] += reach * unif(rng);
        cy[d] += reach * unif(rng);
      }
      const Region bx = Region::ball(cx, r, region.dim);
      const Region by = Region::ball(cy, r, region.dim);
      for (double w : values)
        for (double z : values) {
          auto axy = [&](const Pt& px, const Pt& py) { return a(px, py, w, z); };
          worst = std::max(worst, mean_oscillation(axy, bx, by, cfg));
        }
    }
  }
  return worst;
}

}  // namespace

double vmo_modulus(const KernelPair& kernel, const Region& region, double rho, double M,
                   const VmoSampling& sampling, const QuadConfig& cfg) {
  return vmo_modulus_impl(kernel.a, region, rho, M, sampling, cfg);
}

double vmo_modulus_xy(const CoefB& coef, const Region& region, double rho,
                      const VmoSampling& sampling, const QuadConfig& cfg) {
  auto a = [&coef](const Pt& x, const Pt& y, double, double) { return coef(x, y); };
  VmoSampling s = sampling;
  s.value_lattice = 1;
  return vmo_modulus_impl(a, region, rho, 0.0, s, cfg);
}

double composed_vmo_modulus(const KernelPair& kernel, const GridFunction& u, const Region& region,
                            double rho, const VmoSampling& sampling, const QuadConfig& cfg) {
  auto composed = [&](const Pt& x, const Pt& y) { return kernel.a(x, y, u.eval(x), u.eval(y)); };
  return vmo_modulus_xy(composed, region, rho, sampling, cfg);
}

}  // namespace nldp
