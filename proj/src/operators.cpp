#include "nldp/operators.hpp"

#include <algorithm>
#include <cmath>

#include "nldp/detail/gauss.hpp"

namespace nldp {

WeakFormAssembly::WeakFormAssembly(const DirichletProblem& problem, const QuadConfig& cfg)
    : prob_(problem), cfg_(cfg), dim_(problem.spec.dim) {
  L_ = prob_.box_halfwidth;
  n_ = prob_.cells;
  h_ = 2.0 * L_ / n_;
  if (prob_.f.dim() != dim_) throw std::invalid_argument("WeakFormAssembly: forcing dim mismatch");

  // Interior nodes: strictly inside Omega and strictly inside the box.
  const GridFunction proto(dim_, L_, n_, prob_.g);
  unknown_index_.assign(proto.node_count(), -1);
  for (std::size_t i = 0; i < proto.node_count(); ++i) {
    const Pt x = proto.node_coord(i);
    bool inside = prob_.omega.contains(x);
    if (inside && prob_.omega.kind == RegionKind::Ball)
      inside = dist(x, prob_.omega.center, dim_) < prob_.omega.radius - 1e-12 * h_;
    if (inside && prob_.omega.kind == RegionKind::BoxKind)
      inside = norm_inf({x[0] - prob_.omega.center[0], x[1] - prob_.omega.center[1]}, dim_) <
               prob_.omega.radius - 1e-12 * h_;
    for (int d = 0; d < dim_; ++d)
      if (std::abs(x[d]) >= L_ - 1e-12 * h_) inside = false;
    if (inside) {
      unknown_index_[i] = static_cast<int>(interior_.size());
      interior_.push_back(i);
    }
  }
  build_cells();
  build_exterior_cells();
  build_forcing();
}

void WeakFormAssembly::build_cells() {
  const GridFunction proto(dim_, L_, n_, prob_.g);
  const int m = n_ + 1;
  const int nj = (dim_ == 2) ? n_ : 1;
  for (int j = 0; j < nj; ++j)
    for (int i = 0; i < n_; ++i) {
      Cell c;
      c.box.lo[0] = -L_ + i * h_;
      c.box.hi[0] = -L_ + (i + 1) * h_;
      if (dim_ == 2) {
        c.box.lo[1] = -L_ + j * h_;
        c.box.hi[1] = -L_ + (j + 1) * h_;
      }
      if (dim_ == 1) {
        c.n_nodes = 2;
        c.nodes[0] = i;
        c.nodes[1] = i + 1;
      } else {
        c.n_nodes = 4;
        c.nodes[0] = j * m + i;
        c.nodes[1] = j * m + i + 1;
        c.nodes[2] = (j + 1) * m + i;
        c.nodes[3] = (j + 1) * m + i + 1;
      }
      c.overlaps_omega = classify_box(c.box, prob_.omega) != BoxLocation::Outside;
      c.has_unknown = false;
      for (int k = 0; k < c.n_nodes; ++k)
        if (unknown_index_[c.nodes[k]] >= 0) c.has_unknown = true;
      cells_.push_back(c);
    }
}

void WeakFormAssembly::build_exterior_cells() {
  // Dyadic cells away from each box wall: the first matches the grid
  // spacing (the kernel is singular across the wall), then sizes double.
  // Truncation at 2^44 h makes the committed far tail irrelevant for any
  // admissible closure growth.
  std::vector<std::pair<double, double>> spans;  // [lo, hi) beyond +L
  double lo = 0.0, w = h_;
  for (int k = 0; k < 44 && lo < 1e9 * L_; ++k) {
    spans.push_back({lo, lo + w});
    lo += w;
    w *= 2.0;
  }
  if (dim_ == 1) {
    for (const auto& s : spans) {
      ext_cells_.push_back({{L_ + s.first, 0.0}, {L_ + s.second, 0.0}});
      ext_cells_.push_back({{-L_ - s.second, 0.0}, {-L_ - s.first, 0.0}});
    }
    return;
  }
  // 2D: frames of boxes; along each wall use cells of size comparable to
  // their distance from the box.
  for (const auto& s : spans) {
    const double a = L_ + s.first, b = L_ + s.second;
    const double t = std::max(s.second - s.first, h_);
    const int nt = std::max(1, static_cast<int>(std::ceil(2.0 * a / t)));
    const double step = 2.0 * a / nt;
    for (int k = 0; k < nt; ++k) {
      const double c0 = -a + k * step, c1 = -a + (k + 1) * step;
      ext_cells_.push_back({{a, c0}, {b, c1}});    // right slab
      ext_cells_.push_back({{-b, c0}, {-a, c1}});  // left slab
      ext_cells_.push_back({{c0, a}, {c1, b}});    // top slab
      ext_cells_.push_back({{c0, -b}, {c1, -a}});  // bottom slab
    }
    ext_cells_.push_back({{a, a}, {b, b}});
    ext_cells_.push_back({{-b, a}, {-a, b}});
    ext_cells_.push_back({{a, -b}, {b, -a}});
    ext_cells_.push_back({{-b, -b}, {-a, -a}});
  }
}

void WeakFormAssembly::build_forcing() {
  f_times_phi_ = Eigen::VectorXd::Zero(static_cast<long>(interior_.size()));
  const detail::GaussRule rule = detail::gauss_rule(cfg_.gauss);
  for (const Cell& c : cells_) {
    if (!c.has_unknown) continue;
    if (dim_ == 1) {
      const double cc = 0.5 * (c.box.lo[0] + c.box.hi[0]), hh = 0.5 * c.box.side(0);
      for (int i = 0; i < rule.n; ++i) {
        const Pt x{cc + hh * rule.x[i], 0.0};
        const double w = hh * rule.w[i] * prob_.f.eval(x);
        for (int k = 0; k < c.n_nodes; ++k) {
          const int ui = unknown_index_[c.nodes[k]];
          if (ui >= 0) f_times_phi_[ui] += w * hat(c.nodes[k], x);
        }
      }
    } else {
      const double c0 = 0.5 * (c.box.lo[0] + c.box.hi[0]), h0 = 0.5 * c.box.side(0);
      const double c1 = 0.5 * (c.box.lo[1] + c.box.hi[1]), h1 = 0.5 * c.box.side(1);
      for (int i = 0; i < rule.n; ++i)
        for (int j = 0; j < rule.n; ++j) {
          const Pt x{c0 + h0 * rule.x[i], c1 + h1 * rule.x[j]};
          const double w = h0 * h1 * rule.w[i] * rule.w[j] * prob_.f.eval(x);
          for (int k = 0; k < c.n_nodes; ++k) {
            const int ui = unknown_index_[c.nodes[k]];
            if (ui >= 0) f_times_phi_[ui] += w * hat(c.nodes[k], x);
          }
        }
    }
  }
}

GridFunction WeakFormAssembly::blank(double interior_fill) const {
  GridFunction u(dim_, L_, n_, prob_.g);
  for (std::size_t i = 0; i < u.node_count(); ++i)
    u.at(i) = (unknown_index_[i] >= 0) ? interior_fill : prob_.g.eval(u.node_coord(i));
  return u;
}

void WeakFormAssembly::check_exterior_constraint(const GridFunction& u) const {
  for (std::size_t i = 0; i < u.node_count(); ++i) {
    if (unknown_index_[i] >= 0) continue;
    const double g = prob_.g.eval(u.node_coord(i));
    if (u.at(i) != g)
      throw std::invalid_argument(
          "exterior constraint violated: u must equal g on every non-interior node");
  }
}

template <class PairVisitor>
void WeakFormAssembly::sweep(PairVisitor&& pv, bool exterior_too, SweepOrientation orient) const {
  const bool ordered = (orient != SweepOrientation::Symmetrized);

  const std::size_t nc = cells_.size();
  for (std::size_t i = 0; i < nc; ++i) {
    const Cell& ca = cells_[i];
    const std::size_t j0 = ordered ? 0 : i;
    for (std::size_t j = j0; j < nc; ++j) {
      const Cell& cb = cells_[j];
      const double scale = (!ordered && j != i) ? 2.0 : 1.0;
      auto visit = [&](const Pt& x, const Pt& y, double w) -> double {
        if (orient == SweepOrientation::Reverse) return pv(cb, ca, y, x, w * scale, false);
        return pv(ca, cb, x, y, w * scale, false);
      };
      detail::PairEngine<decltype(visit)> engine(dim_, 0.0, cfg_, visit);
      engine.box_pair(ca.box, cb.box);
    }
  }
  if (!exterior_too) return;
  for (std::size_t i = 0; i < nc; ++i) {
    const Cell& ca = cells_[i];
    if (!ca.overlaps_omega) continue;
    for (const Box& eb : ext_cells_) {
      auto visit = [&](const Pt& x, const Pt& y, double w) -> double {
        // Both orientations of (box, exterior) pairs at once.
        return pv(ca, ca, x, y, 2.0 * w, true);
      };
      detail::PairEngine<decltype(visit)> engine(dim_, 0.0, cfg_, visit);
      engine.box_pair(ca.box, eb);
    }
  }
}

WeakFormAssembly::Result WeakFormAssembly::assemble(const GridFunction& u, bool want_energy,
                                                    bool want_residual, bool want_hessian,
                                                    SweepOrientation orient) const {
  const std::size_t nu = interior_.size();
  Result res;
  if (want_residual) res.residual = Eigen::VectorXd::Zero(static_cast<long>(nu));
  if (want_hessian) res.hessian = Eigen::MatrixXd::Zero(static_cast<long>(nu), static_cast<long>(nu));
  Accumulator energy(SummationMode::Kahan);

  const double p = prob_.spec.p, q = prob_.spec.q;
  const double sp = prob_.spec.s * p, tq = prob_.spec.t * q;
  const bool live = !frozen_.has_value();

  auto pv = [&](const Cell& ca, const Cell& cb, const Pt& x, const Pt& y, double w,
                bool y_exterior) -> double {
    const double ux = u.eval(x);
    const double uy = u.eval(y);
    const double du = ux - uy;
    const double r = dist(x, y, dim_);
    const double A = live ? prob_.kernel.a(x, y, ux, uy) : (*frozen_)(x, y);
    const double B = prob_.kernel.b(x, y);
    const double kp = A * std::pow(r, -sp) * w;
    const double kq = (B != 0.0) ? B * std::pow(r, -tq) * w : 0.0;

    double out = 0.0;
    if (want_energy) {
      const double e = kp * std::pow(std::abs(du), p) / p +
                       ((kq != 0.0) ? kq * std::pow(std::abs(du), q) / q : 0.0);
      energy.add(e);
      out = e;
    }
    if (want_residual || want_hessian) {
      const double gp = kp * bracket_power(du, p) + kq * bracket_power(du, q);
      const double hp = (want_hessian)
                            ? kp * (p - 1.0) * std::pow(std::abs(du), p - 2.0) +
                                  kq * (q - 1.0) * std::pow(std::abs(du), q - 2.0)
                            : 0.0;
      int ids[8];
      double dphi[8];
      int cnt = 0;
      for (int k = 0; k < ca.n_nodes; ++k) {
        const int ui = unknown_index_[ca.nodes[k]];
        if (ui < 0) continue;
        ids[cnt] = ui;
        dphi[cnt] = hat(ca.nodes[k], x) - (y_exterior ? 0.0 : hat(ca.nodes[k], y));
        ++cnt;
      }
      if (!y_exterior && &ca != &cb) {
        for (int k = 0; k < cb.n_nodes; ++k) {
          const int ui = unknown_index_[cb.nodes[k]];
          if (ui < 0) continue;
          bool dup = false;
          for (int m2 = 0; m2 < ca.n_nodes; ++m2)
            if (cb.nodes[k] == ca.nodes[m2]) dup = true;
          if (dup) continue;
          ids[cnt] = ui;
          dphi[cnt] = hat(cb.nodes[k], x) - hat(cb.nodes[k], y);
          ++cnt;
        }
      }
      for (int a2 = 0; a2 < cnt; ++a2) {
        if (want_residual) res.residual[ids[a2]] += gp * dphi[a2];
        if (want_hessian)
          for (int b2 = 0; b2 < cnt; ++b2)
            res.hessian(ids[a2], ids[b2]) += hp * dphi[a2] * dphi[b2];
      }
      if (!want_energy) out = gp;
    }
    return out;
  };
  sweep(pv, true, orient);

  if (want_energy) {
    double ef = 0.0;
    for (std::size_t k = 0; k < nu; ++k) ef += u.at(interior_[k]) * f_times_phi_[k];
    res.energy = energy.value() - ef;
  }
  if (want_residual) res.residual -= f_times_phi_;
  return res;
}

Eigen::VectorXd WeakFormAssembly::residual(const GridFunction& u, SweepOrientation orient) const {
  check_exterior_constraint(u);
  return assemble(u, false, true, false, orient).residual;
}

double WeakFormAssembly::residual_sup_norm(const GridFunction& u) const {
  const Eigen::VectorXd r = assemble(u, false, true, false).residual;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

double WeakFormAssembly::frozen_energy(const GridFunction& u) const {
  if (!frozen_.has_value())
    throw std::logic_error("frozen_energy: assembly is in live-kernel mode");
  return assemble(u, true, false, false).energy;
}

double WeakFormAssembly::monotonicity_pairing(const GridFunction& u, const GridFunction& v) const {
  check_exterior_constraint(u);
  check_exterior_constraint(v);
  const double p = prob_.spec.p, q = prob_.spec.q;
  const double sp = prob_.spec.s * p, tq = prob_.spec.t * q;
  const bool live = !frozen_.has_value();
  Accumulator acc(SummationMode::Kahan);
  auto pv = [&](const Cell&, const Cell&, const Pt& x, const Pt& y, double w,
                bool y_exterior) -> double {
    (void)y_exterior;
    const double ux = u.eval(x), vx = v.eval(x);
    const double uy = u.eval(y), vy = v.eval(y);
    const double dwu = (ux - vx) - (uy - vy);
    const double r = dist(x, y, dim_);
    const double A = live ? prob_.kernel.a(x, y, ux, uy) : (*frozen_)(x, y);
    const double B = prob_.kernel.b(x, y);
    double val = A * std::pow(r, -sp) * (bracket_power(ux - uy, p) - bracket_power(vx - vy, p));
    if (B != 0.0)
      val += B * std::pow(r, -tq) * (bracket_power(ux - uy, q) - bracket_power(vx - vy, q));
    const double out = val * dwu * w;
    acc.add(out);
    return out;
  };
  sweep(pv, true, SweepOrientation::Symmetrized);
  return acc.value();
}

double WeakFormAssembly::global_seminorm_p(const GridFunction& u, const GridFunction& v) const {
  const double p = prob_.spec.p;
  const double sp = prob_.spec.s * p;
  Accumulator acc(SummationMode::Kahan);
  auto pv = [&](const Cell&, const Cell&, const Pt& x, const Pt& y, double w,
                bool y_exterior) -> double {
    (void)y_exterior;
    const double wx = u.eval(x) - v.eval(x);
    const double wy = u.eval(y) - v.eval(y);
    const double r = dist(x, y, dim_);
    const double out = std::pow(std::abs(wx - wy), p) * std::pow(r, -sp) * w;
    acc.add(out);
    return out;
  };
  sweep(pv, true, SweepOrientation::Symmetrized);
  return acc.value();
}

double WeakFormAssembly::residual_component_direct(const GridFunction& u,
                                                   std::size_t node) const {
  check_exterior_constraint(u);
  const int ui = unknown_index_[node];
  if (ui < 0) throw std::invalid_argument("residual_component_direct: not an interior node");
  const double p = prob_.spec.p, q = prob_.spec.q;
  const double sp = prob_.spec.s * p, tq = prob_.spec.t * q;
  const bool live = !frozen_.has_value();
  const Region box_region = Region::box({0.0, 0.0}, L_, dim_);
  const PartitionSpec part = [&] {
    PartitionSpec ps;
    ps.cell_size = h_;
    ps.origin = -L_;
    return ps;
  }();

  auto coefA = [&](const Pt& x, const Pt& y, double ux, double uy) {
    return live ? prob_.kernel.a(x, y, ux, uy) : (*frozen_)(x, y);
  };

  auto Fp = [&](const Pt& x, const Pt& y) {
    const double ux = u.eval(x), uy = u.eval(y);
    return coefA(x, y, ux, uy) * bracket_power(ux - uy, p) * (hat(node, x) - hat(node, y));
  };
  auto Fq = [&](const Pt& x, const Pt& y) {
    const double B = prob_.kernel.b(x, y);
    if (B == 0.0) return 0.0;
    const double ux = u.eval(x), uy = u.eval(y);
    return B * bracket_power(ux - uy, q) * (hat(node, x) - hat(node, y));
  };
  double val = pair_integral(Fp, box_region, box_region, sp, cfg_, part);
  val += pair_integral(Fq, box_region, box_region, tq, cfg_, part);

  // Exterior part: 2 int_{supp phi} phi(x) int_{R^N \ box} [...] dy dx.
  const Pt xn = node_pt(node);
  const Region supp = Region::box(xn, h_, dim_);
  auto inner = [&](const Pt& x) {
    const double ux = u.eval(x);
    auto fy = [&](const Pt& y) {
      const double gy = prob_.g.eval(y);
      const double r = dist(x, y, dim_);
      double s = coefA(x, y, ux, gy) * bracket_power(ux - gy, p) * std::pow(r, -(dim_ + sp));
      const double B = prob_.kernel.b(x, y);
      if (B != 0.0) s += B * bracket_power(ux - gy, q) * std::pow(r, -(dim_ + tq));
      return s;
    };
    const double kap = prob_.g.growth_kappa;
    const double decay = dim_ + std::min(sp - kap * (p - 1.0), tq - kap * (q - 1.0));
    return hat(node, x) *
           integral_outside_region(dim_, Region::box({0.0, 0.0}, L_, dim_), L_, fy, fy, decay,
                                   cfg_, part);
  };
  val += 2.0 * region_integral(inner, supp, cfg_, part);
  return val - f_times_phi_[ui];
}

void WeakFormAssembly::freeze(FrozenCoef A) { frozen_ = std::move(A); }
void WeakFormAssembly::freeze_at(const GridFunction& u_freeze) {
  frozen_ = prob_.kernel.frozen_at(u_freeze);
}
void WeakFormAssembly::unfreeze() { frozen_.reset(); }

}  // namespace nldp
