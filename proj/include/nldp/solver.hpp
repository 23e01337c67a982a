#pragma once

#include "nldp/operators.hpp"

namespace nldp {

struct SolveConfig {
  double inner_tol = 1e-10;   // residual sup-norm target of the frozen solve
  double outer_tol = 1e-8;    // successive-iterate sup-norm target
  int max_inner = 60;
  int max_outer = 40;
  double relaxation = 0.5;    // outer damping theta in (0,1]
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtrack = 45;

  void validate() const {
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0))
      throw std::invalid_argument("SolveConfig: tolerances must be positive");
    if (!(relaxation > 0.0 && relaxation <= 1.0))
      throw std::invalid_argument("SolveConfig: relaxation must lie in (0,1]");
  }
};

struct SolveReport {
  GridFunction solution;
  int inner_iterations = 0;
  int outer_iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // per accepted inner step
  std::vector<double> energy_history;    // frozen energy per accepted step
  std::vector<double> outer_drift;       // ||u_{k+1} - u_k||_inf per outer step
  std::vector<double> coef_drift;        // ||A_{k+1} - A_k||_inf sampled
  std::vector<double> modulus_bound;     // omega_a applied to the drift
  bool converged = false;
  std::string message;
};

class StagnationError : public std::runtime_error {
 public:
  explicit StagnationError(const std::string& m) : std::runtime_error(m) {}
};

// Damped-Newton descent on the frozen convex energy; terminates when the
// residual sup-norm reaches cfg.inner_tol. Energy strictly decreases along
// accepted steps.
SolveReport solve_frozen(WeakFormAssembly& asm_, const SolveConfig& cfg,
                         const GridFunction* initial = nullptr);

// Outer Picard iteration freezing a at the current iterate:
//   A_k(x,y) = a(x,y, u_k(x), u_k(y)),
//   u_{k+1} = (1-theta) u_k + theta solve_frozen(A_k).
// Terminates on iterate drift; reports the coefficient drift check
// ||A_{k+1}-A_k||_inf <= omega_a(||u_{k+1}-u_k||_inf) per step. When a does
// not depend on the solution the loop exits after one correction step.
SolveReport solve_dirichlet(const DirichletProblem& problem, const QuadConfig& quad,
                            const SolveConfig& cfg);

// Averaged-coefficient comparison problem: freeze (a)_{4s,0}, (b)_{4s,0} on
// B_{4s} x B_{4s} (s = scale), solve the homogeneous problem on B_{2s} with
// exterior datum u, and report the gap on B_s.
struct ComparisonReport {
  GridFunction v;
  double gap = 0.0;          // ||u - v||_{L^inf(B_s)}
  double a_mean = 0.0;
  double b_mean = 0.0;
  double coef_deviation = 0.0;  // avg |a - (a)| + |b - (b)| over B_{4s}^2
};
ComparisonReport solve_averaged_comparison(const GridFunction& u, const DirichletProblem& problem,
                                           const QuadConfig& quad, const SolveConfig& cfg,
                                           double scale = 1.0);

}  // namespace nldp
