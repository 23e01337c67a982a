#include "nldp/solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace nldp {

namespace {

void set_interior(GridFunction& u, const std::vector<std::size_t>& nodes,
                  const Eigen::VectorXd& vals) {
  for (std::size_t k = 0; k < nodes.size(); ++k) u.at(nodes[k]) = vals[static_cast<long>(k)];
}

Eigen::VectorXd get_interior(const GridFunction& u, const std::vector<std::size_t>& nodes) {
  Eigen::VectorXd v(static_cast<long>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) v[static_cast<long>(k)] = u.at(nodes[k]);
  return v;
}

}  // namespace

SolveReport solve_frozen(WeakFormAssembly& asm_, const SolveConfig& cfg,
                         const GridFunction* initial) {
  cfg.validate();
  if (!asm_.is_frozen()) throw std::logic_error("solve_frozen: assembly must be frozen");

  SolveReport rep;
  GridFunction u = initial ? *initial : asm_.blank(0.0);
  asm_.check_exterior_constraint(u);
  const auto& nodes = asm_.interior_nodes();
  const long nu = static_cast<long>(nodes.size());

  double energy = asm_.frozen_energy(u);
  for (int it = 0; it < cfg.max_inner; ++it) {
    auto sys = asm_.assemble(u, false, true, true);
    const double rn = nu ? sys.residual.cwiseAbs().maxCoeff() : 0.0;
    rep.residual_history.push_back(rn);
    rep.energy_history.push_back(energy);
    if (rn <= cfg.inner_tol) {
      rep.converged = true;
      rep.final_residual = rn;
      rep.inner_iterations = it;
      rep.solution = u;
      return rep;
    }

    // Newton direction with Levenberg fallback for the degenerate Hessian.
    Eigen::VectorXd dir;
    double mu = 0.0;
    const double trace_scale = std::max(sys.hessian.trace() / std::max<long>(nu, 1), 1e-30);
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd H = sys.hessian;
      if (mu > 0.0)
        for (long i = 0; i < nu; ++i) H(i, i) += mu;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() == Eigen::Success) {
        dir = -ldlt.solve(sys.residual);
        if (dir.allFinite() && dir.dot(sys.residual) < 0.0) break;
      }
      mu = (mu == 0.0) ? 1e-10 * trace_scale : mu * 100.0;
      dir.resize(0);
    }
    if (dir.size() == 0) {
      dir = -sys.residual;  // steepest descent as a last resort
    }

    // Armijo backtracking on the convex energy.
    const double slope = dir.dot(sys.residual);
    const Eigen::VectorXd u0 = get_interior(u, nodes);
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtrack; ++bt) {
      set_interior(u, nodes, u0 + step * dir);
      const double e_try = asm_.frozen_energy(u);
      if (e_try <= energy + cfg.armijo_c * step * slope) {
        energy = e_try;
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      set_interior(u, nodes, u0);
      throw StagnationError("solve_frozen: line search stagnated");
    }
  }
  rep.solution = u;
  rep.final_residual = asm_.residual_sup_norm(u);
  rep.inner_iterations = cfg.max_inner;
  rep.converged = rep.final_residual <= cfg.inner_tol;
  rep.message = rep.converged ? "" : "max_inner reached";
  return rep;
}

namespace {

// Harmonic-type initialization: the p=2, a=1, b=0 frozen problem on the
// same grid. Cheap and well scaled.
GridFunction initial_guess(const DirichletProblem& problem, const QuadConfig& quad,
                           const SolveConfig& cfg) {
  DirichletProblem lin = problem;
  lin.spec.p = 2.0;
  lin.spec.q = 2.0;
  lin.spec.t = lin.spec.s;
  lin.kernel = KernelPair::constant(1.0, 0.0);
  WeakFormAssembly asm2(lin, quad);
  asm2.freeze([](const Pt&, const Pt&) { return 1.0; });
  SolveConfig c2 = cfg;
  c2.inner_tol = std::max(cfg.inner_tol, 1e-12);
  c2.max_inner = 30;
  return solve_frozen(asm2, c2).solution;
}

}  // namespace

SolveReport solve_dirichlet(const DirichletProblem& problem, const QuadConfig& quad,
                            const SolveConfig& cfg) {
  cfg.validate();
  validate_spec(problem.spec);
  WeakFormAssembly asm_(problem, quad);

  GridFunction u = initial_guess(problem, quad, cfg);
  const double theta = problem.kernel.a_value_dependent ? cfg.relaxation : 1.0;

  SolveReport rep;
  int total_inner = 0;
  for (int k = 0; k < cfg.max_outer; ++k) {
    asm_.freeze_at(u);
    SolveReport inner = solve_frozen(asm_, cfg, &u);
    total_inner += std::max(inner.inner_iterations, 1);

    GridFunction u_next = u;
    for (std::size_t idx : asm_.interior_nodes())
      u_next.at(idx) = (1.0 - theta) * u.at(idx) + theta * inner.solution.at(idx);

    double drift = 0.0;
    for (std::size_t idx : asm_.interior_nodes())
      drift = std::max(drift, std::abs(u_next.at(idx) - u.at(idx)));
    rep.outer_drift.push_back(drift);

    // Coefficient drift against the (A3) modulus, sampled on node pairs.
    double cd = 0.0;
    const auto& nodes = asm_.interior_nodes();
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / 16);
    for (std::size_t i = 0; i < nodes.size(); i += stride)
      for (std::size_t j = 0; j < nodes.size(); j += stride) {
        const Pt x = u.node_coord(nodes[i]), y = u.node_coord(nodes[j]);
        cd = std::max(cd, std::abs(problem.kernel.a(x, y, u_next.eval(x), u_next.eval(y)) -
                                   problem.kernel.a(x, y, u.eval(x), u.eval(y))));
      }
    rep.coef_drift.push_back(cd);
    rep.modulus_bound.push_back(problem.kernel.omega_a(drift));

    u = u_next;
    rep.outer_iterations = k + 1;
    if (drift <= cfg.outer_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.inner_iterations = total_inner;
  rep.solution = u;
  // Final residual against the live kernel.
  WeakFormAssembly live(problem, quad);
  rep.final_residual = live.residual_sup_norm(u);
  if (!rep.converged)
    rep.message = "outer iteration did not converge; drift history retained for diagnostics";
  return rep;
}

ComparisonReport solve_averaged_comparison(const GridFunction& u, const DirichletProblem& problem,
                                           const QuadConfig& quad, const SolveConfig& cfg,
                                           double scale) {
  const int dim = problem.spec.dim;
  const double s4 = 4.0 * scale, s2 = 2.0 * scale;
  const Region b4 = Region::ball({0.0, 0.0}, s4, dim);

  // Coefficient means over B_{4s} x B_{4s}; the live a is composed with u
  // when it depends on the solution.
  auto A = [&](const Pt& x, const Pt& y) {
    return problem.kernel.a(x, y, u.eval(x), u.eval(y));
  };
  PartitionSpec part = PartitionSpec::unaligned(s4 / 8.0);
  auto mean_xy = [&](const std::function<double(const Pt&, const Pt&)>& f) {
    auto outer = [&](const Pt& x) {
      return region_mean([&](const Pt& y) { return f(x, y); }, b4, quad, part);
    };
    return region_mean(outer, b4, quad, part);
  };
  ComparisonReport rep;
  rep.a_mean = mean_xy(A);
  rep.b_mean = mean_xy(problem.kernel.b);
  rep.coef_deviation = mean_xy([&](const Pt& x, const Pt& y) {
    return std::abs(A(x, y) - rep.a_mean) + std::abs(problem.kernel.b(x, y) - rep.b_mean);
  });

  // Frozen comparison operator: averaged inside B_{4s} x B_{4s}. The
  // closures own copies of everything they touch.
  const double am = rep.a_mean, bm = rep.b_mean;
  CoefA a_live = problem.kernel.a;
  GridFunction u_copy = u;
  auto a_tilde = [b4, am, a_live, u_copy](const Pt& x, const Pt& y) {
    return (b4.contains(x) && b4.contains(y)) ? am
                                              : a_live(x, y, u_copy.eval(x), u_copy.eval(y));
  };
  CoefB b_orig = problem.kernel.b;
  auto b_tilde = [b4, bm, b_orig](const Pt& x, const Pt& y) {
    return (b4.contains(x) && b4.contains(y)) ? bm : b_orig(x, y);
  };

  DirichletProblem comp = problem;
  comp.omega = Region::ball({0.0, 0.0}, s2, dim);
  comp.kernel.b = b_tilde;
  comp.kernel.a_value_dependent = false;
  // v = u outside B_{2s}: exterior datum is u itself.
  comp.g.eval = [u](const Pt& y) { return u.eval(y); };
  comp.g.growth_C = u.exterior().growth_C + u.max_abs_node();
  comp.g.growth_kappa = u.exterior().growth_kappa;
  comp.f = GridFunction(dim, problem.box_halfwidth, problem.cells, ExteriorField::zero());

  WeakFormAssembly asm_(comp, quad);
  asm_.freeze(a_tilde);
  GridFunction init = asm_.blank();
  for (std::size_t idx : asm_.interior_nodes()) init.at(idx) = u.at(idx);
  SolveReport inner = solve_frozen(asm_, cfg, &init);

  rep.v = inner.solution;
  double gap = 0.0;
  for (std::size_t i = 0; i < u.node_count(); ++i) {
    const Pt x = u.node_coord(i);
    if (norm(x, dim) <= scale) gap = std::max(gap, std::abs(u.at(i) - rep.v.at(i)));
  }
  rep.gap = gap;
  return rep;
}

}  // namespace nldp
