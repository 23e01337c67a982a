#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nldp/functionals.hpp"
#include "nldp/solver.hpp"

namespace nldp {

// The constants in the estimates are existential, so inequalities are
// verified by the stability of the fitted constant LHS / sum(RHS) under
// mesh refinement, not by absolute thresholds.
struct InequalityVerdict {
  std::string name;
  double lhs = 0.0;
  std::vector<std::pair<std::string, double>> rhs_terms;
  double fitted_constant = 0.0;
  bool passed = false;
  std::vector<double> refinement_trace;
  bool warning = false;
  std::string note;

  double rhs_sum() const {
    double s = 0.0;
    for (const auto& t : rhs_terms) s += t.second;
    return s;
  }
};

// Stability across refinements: max/min of the fitted constants.
bool refinement_stable(const std::vector<double>& fitted, double stability_ratio = 2.0);
InequalityVerdict merge_refinements(std::vector<InequalityVerdict> levels,
                                    double stability_ratio = 2.0);

struct HolderFit {
  Pt center{0.0, 0.0};
  std::vector<double> radii;
  std::vector<double> oscillations;
  double alpha_measured = 0.0;
  double theta_predicted = 0.0;
  bool passed = false;
  bool degenerate = false;
  double slack = 0.1;
};

// Caccioppoli-type energy estimate on B = B_R(x0) with inner radius r:
// cutoff-localized seminorms against bulk terms, the forcing term with
// exponent p* + frakA, and the two tail couplings.
InequalityVerdict caccioppoli_check(const GridFunction& u, const GridFunction& f,
                                    const ProblemSpec& spec, const DerivedExponents& der,
                                    const KernelPair& kernel, const Pt& x0, double R, double r,
                                    const QuadConfig& cfg, const PartitionSpec& part,
                                    bool is_solution = true);

// Fractional Sobolev inequality: eta-mean oscillation against the dual-pair
// average of U^m.
InequalityVerdict sobolev_poincare_check(const DualPairField& field, const Pt& x0, double R,
                                         double eta, const QuadConfig& cfg,
                                         const PartitionSpec& part);

// Diagonal reverse Holder inequality with refined tail, free parameter
// sigma in (0,1).
InequalityVerdict reverse_holder_check(const DualPairField& field, const Pt& x0, double R, int l,
                                       double sigma_param, double b_sup, const QuadConfig& cfg,
                                       const PartitionSpec& part);

// Self-improving estimate: the (1+delta)-power seminorm over B_{rho0/2}
// against seminorm, forcing and tail terms over B_{2 rho0}. delta halves
// automatically when the raised power is not integrable.
InequalityVerdict self_improving_check(const GridFunction& u, const GridFunction& f,
                                       const ProblemSpec& spec, const DerivedExponents& der,
                                       const Pt& x0, double rho0, double delta, double b_sup,
                                       const QuadConfig& cfg, const PartitionSpec& part);

// L^infinity bound by the average power, forcing, tails (+ boundary datum).
InequalityVerdict boundedness_check(const GridFunction& u, const GridFunction& f,
                                    const ProblemSpec& spec, const DerivedExponents& der,
                                    const std::optional<CoefB>& b, bool b_x_dependent,
                                    const Pt& x0, double r, std::optional<double> g_sup,
                                    const QuadConfig& cfg, const PartitionSpec& part);

// Least-squares slope of log osc_{B_r} u against log r over dyadic radii.
HolderFit holder_exponent_fit(const GridFunction& u, const Pt& center,
                              const std::vector<double>& radii, double theta_predicted,
                              double slack = 0.1);

// Zoomed problem data produced by the normalization transforms.
struct ZoomedProblem {
  GridFunction u;
  GridFunction f;
  KernelPair kernel;
  double smallness = 0.0;  // M^{q-p} (rho/4)^{sp-tq}, recorded metadata
};

// u~(x) = u(rho0 x + x0), f~ = rho0^{sp} f(rho0 x + x0),
// a~(x,y,w,z) = a(rho0 x + x0, ...), b~ = rho0^{sp-tq} b(...).
// rho0 must be a power of two times the grid spacing and x0 a grid node,
// so nodal resampling is exact.
ZoomedProblem zoom_normalize(const GridFunction& u, const GridFunction& f,
                             const KernelPair& kernel, const ProblemSpec& spec, const Pt& x0,
                             double rho0);

// u_z = u(rho x/4 + z)/M with the matching forcing/coefficient scalings.
ZoomedProblem zoom_rescale_M(const GridFunction& u, const GridFunction& f,
                             const KernelPair& kernel, const ProblemSpec& spec, const Pt& z,
                             double rho, double M);

}  // namespace nldp
