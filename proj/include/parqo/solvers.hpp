#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <optional>
#include <vector>

#include "parqo/errors.hpp"
#include "parqo/metrics.hpp"

namespace parqo {

/// Gram matrices with a larger spectral condition number are rejected at
/// construction: the affine projection divides by their smallest eigenvalue.
inline constexpr double kMaxGramCondition = 1e12;

/// An underdetermined constraint set {x : A·x = y} with the Cholesky factor
/// of A·Aᴴ cached, so projections cost two matrix-vector products and two
/// triangular solves. Immutable; safe to share across concurrent solvers.
class LinearSystem {
 public:
  /// Requires M ≤ N and a well-conditioned A·Aᴴ (cond ≤ kMaxGramCondition),
  /// otherwise throws std::invalid_argument / SingularSystemError.
  LinearSystem(ComplexMatrix a, ComplexVector y);

  Eigen::Index equations() const { return a_.rows(); }
  Eigen::Index unknowns() const { return a_.cols(); }
  const ComplexMatrix& a() const { return a_; }
  const ComplexVector& y() const { return y_; }
  double gram_condition() const { return gram_condition_; }

  /// Euclidean projection onto the solution set:
  /// z − Aᴴ(AAᴴ)⁻¹(Az − y). project(0) is the minimum-norm solution.
  ComplexVector project(const ComplexVector& z) const;

  /// ‖Ax − y‖₂/‖y‖₂ (absolute residual when y = 0).
  double residual(const ComplexVector& x) const;

 private:
  ComplexMatrix a_;
  ComplexVector y_;
  Eigen::LLT<ComplexMatrix> gram_llt_;
  double gram_condition_ = 0.0;
};

ComplexVector affine_project(const ComplexVector& z, const LinearSystem& sys);

/// Minimum-ℓ₂-norm solution, affine_project(0, sys).
ComplexVector solve_ls(const LinearSystem& sys);

struct SolverConfig {
  double p = 4.0;
  double q = 2.0;
  /// Gradient step size (FBS) or proximal weight (DRS). Empty selects the
  /// automatic choice: FBS probes by halving from 1, DRS uses ‖y‖₂/√M.
  std::optional<double> tau{};
  int k_max = 20;
  double feas_tol = 1e-10;
  bool record_trace = true;
  /// FBS stops early once the objective falls below this value; 0 disables
  /// and the solver always runs exactly k_max iterations.
  double objective_exit = 0.0;

  void validate(bool require_finite_p) const;
};

struct IterRecord {
  int iteration = 0;   // 1-based; iteration 1 is the least-squares point
  double objective = 0.0;
  ParReport report;
};

using IterTrace = std::vector<IterRecord>;

struct SolveResult {
  ComplexVector x;
  IterTrace trace;
  double tau_used = 0.0;
  /// Set when the automatic step probe found no decreasing step
  /// (start point already stationary).
  bool step_warning = false;
};

/// Gradient of objective_f in the conjugate-coordinate convention:
///   (N^(2/q−2/p)·‖x‖p^(2−p)·|x|^(p−2) − ‖x‖q^(2−q)·|x|^(q−2)) ∘ x.
/// Entries with |x_i| < 1e-300 contribute a zero component (a valid
/// subgradient selection for q < 2, where |x_i|^(q−2) is singular at 0).
ComplexVector grad_lplq(const ComplexVector& x, double p, double q);

struct StepProbe {
  double tau = 0.0;
  /// False when no probed step strictly decreased the objective.
  bool decreased = false;
};

/// Largest tau in {1, 1/2, 1/4, ..., 2^-40} for which a single FBS step from
/// x0 strictly decreases objective_f. Returns 2^-40 with decreased = false
/// when x0 is already (near-)stationary.
StepProbe probe_step_size(const LinearSystem& sys, const ComplexVector& x0,
                          const SolverConfig& cfg);

/// Forward-backward splitting on the surrogate objective subject to Ax = y.
/// Iteration 1 is the least-squares solution; afterwards
/// x ← project(x − tau·grad). With automatic tau the objective decreases
/// monotonically along the trace.
SolveResult solve_fbs_lplq(const LinearSystem& sys, const SolverConfig& cfg);

/// Euclidean projection of a complex vector onto {u : ‖u‖₁ ≤ radius}.
/// Phases are preserved; magnitudes are soft-thresholded by the unique
/// θ ≥ 0 with Σ max(|v_i| − θ, 0) = radius (sort-and-scan).
ComplexVector project_l1_ball(const ComplexVector& v, double radius);

/// prox of tau·‖·‖∞ via the Moreau identity: z − project_l1_ball(z, tau).
ComplexVector prox_linf(const ComplexVector& z, double tau);

/// Douglas-Rachford splitting for min ‖x‖∞ subject to Ax = y (cfg.p/q only
/// affect reporting). Iteration 1 is the least-squares solution; every
/// reported iterate is feasible. For full-spark A the converged solution
/// satisfies PAR ≤ N/(N−M+1).
SolveResult solve_drs_linf(const LinearSystem& sys, const SolverConfig& cfg);

}  // namespace parqo
