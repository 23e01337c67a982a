#pragma once

#include <Eigen/Dense>
#include <optional>

#include "nldp/functionals.hpp"
#include "nldp/quadrature.hpp"

namespace nldp {

// Dirichlet data for the solve domain Omega inside the truncation box:
// nodes outside Omega are pinned to g, and g's closure supplies values
// beyond the box. The collar is the whole box; pairs with both points
// outside the box couple only through the exterior cells.
struct DirichletProblem {
  ProblemSpec spec;
  KernelPair kernel;
  Region omega;
  double box_halfwidth = 2.0;
  int cells = 64;
  ExteriorField g;
  GridFunction f;
};

enum class SweepOrientation { Symmetrized, Forward, Reverse };

// Discrete weak form of the double-phase operator over nodal hats:
// component i of the residual is
//   int int a(x,y,u(x),u(y)) [u(x)-u(y)]^{p-1} (phi_i(x)-phi_i(y)) dmu_1
// + int int b(x,y) [u(x)-u(y)]^{q-1} (phi_i(x)-phi_i(y)) dmu_2  -  int f phi_i,
// assembled as an interior part (box x box) plus an exterior part
// (Omega-cells x dyadic exterior cells), mirroring the A^1 + A^2 splitting.
class WeakFormAssembly {
 public:
  WeakFormAssembly(const DirichletProblem& problem, const QuadConfig& cfg);

  void freeze(FrozenCoef A);
  void freeze_at(const GridFunction& u_freeze);
  void unfreeze();
  bool is_frozen() const { return frozen_.has_value(); }

  const DirichletProblem& problem() const { return prob_; }
  int dim() const { return dim_; }
  std::size_t unknowns() const { return interior_.size(); }
  const std::vector<std::size_t>& interior_nodes() const { return interior_; }

  // Fresh grid function with exterior/fixed nodes set to g and interior
  // values zero (or a given fill).
  GridFunction blank(double interior_fill = 0.0) const;

  // Enforce X_g membership: every non-interior node must carry g exactly.
  void check_exterior_constraint(const GridFunction& u) const;

  struct Result {
    double energy = 0.0;
    Eigen::VectorXd residual;
    Eigen::MatrixXd hessian;
  };
  Result assemble(const GridFunction& u, bool want_energy, bool want_residual, bool want_hessian,
                  SweepOrientation orient = SweepOrientation::Symmetrized) const;

  Eigen::VectorXd residual(const GridFunction& u,
                           SweepOrientation orient = SweepOrientation::Symmetrized) const;
  double residual_sup_norm(const GridFunction& u) const;

  // Variational energy of the frozen problem; throws in live mode.
  double frozen_energy(const GridFunction& u) const;

  // <A(u) - A(v), u - v> for u = v = g outside Omega.
  double monotonicity_pairing(const GridFunction& u, const GridFunction& v) const;

  // [w]^p_{W^{s,p}(R^N)} for w vanishing outside Omega (w = u - v).
  double global_seminorm_p(const GridFunction& u, const GridFunction& v) const;

  // Independent assembly path for one component, via the generic pair
  // quadrature; used to cross-check the scatter sweep.
  double residual_component_direct(const GridFunction& u, std::size_t node) const;

  // int f phi_i for interior node i (by unknown index).
  const Eigen::VectorXd& forcing_vector() const { return f_times_phi_; }

 private:
  struct Cell {
    Box box;
    int nodes[4];
    int n_nodes;
    bool overlaps_omega;
    bool has_unknown;
  };

  template <class PairVisitor>
  void sweep(PairVisitor&& pv, bool exterior_too, SweepOrientation orient) const;

  Pt node_pt(std::size_t idx) const {
    const int m = n_ + 1;
    Pt p{-L_ + static_cast<int>(idx % m) * h_, 0.0};
    if (dim_ == 2) p[1] = -L_ + static_cast<int>(idx / m) * h_;
    return p;
  }
  double hat(std::size_t node, const Pt& x) const {
    const Pt xn = node_pt(node);
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) {
      const double t = 1.0 - std::abs(x[d] - xn[d]) / h_;
      if (t <= 0.0) return 0.0;
      v *= t;
    }
    return v;
  }
  void build_cells();
  void build_exterior_cells();
  void build_forcing();

  DirichletProblem prob_;
  QuadConfig cfg_;
  int dim_;
  double L_, h_;
  int n_;
  std::optional<FrozenCoef> frozen_;
  std::vector<int> unknown_index_;       // node -> unknown or -1
  std::vector<std::size_t> interior_;    // unknown -> node
  std::vector<Cell> cells_;
  std::vector<Box> ext_cells_;
  Eigen::VectorXd f_times_phi_;
};

}  // namespace nldp
