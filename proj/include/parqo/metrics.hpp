#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

namespace parqo {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

class LinearSystem;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Power ratio to decibels, 10·log10(x).
double to_db(double linear);
double from_db(double db);

/// ℓp-norm of a complex vector for real p ≥ 1; p = kInf gives the max-norm.
/// Magnitudes are scaled by their maximum before exponentiation so large p
/// does not overflow.
double lp_norm(const ComplexVector& x, double p);

/// Peak-to-average power ratio N·‖x‖∞²/‖x‖₂², in [1, N].
/// The lower bound is met exactly by vectors whose entries share one
/// magnitude, the upper bound by one-sparse vectors.
double par(const ComplexVector& x);

/// True iff all magnitudes agree to a relative tolerance:
/// max|x_i| − min|x_i| ≤ tol·max|x_i|.
bool is_min_par(const ComplexVector& x, double tol);

/// Power increase over a reference solution, ‖x‖₂²/‖x_ls‖₂².
double pinc(const ComplexVector& x, const ComplexVector& x_ls);

/// ℓp−ℓq surrogate PAR, N^(2/q−2/p)·‖x‖p²/‖x‖q² for 1 ≤ q < p (p may be
/// kInf). Lies in [1, N^(2/q−2/p)] with the same extremal vectors as par().
double par_pq(const ComplexVector& x, double p, double q);

/// Surrogate objective N^(2/q−2/p)·‖x‖p² − ‖x‖q² for 1 ≤ q < p < ∞.
/// Nonnegative, and zero exactly at min-PAR vectors (norm equivalence);
/// rejects p = ∞ since its gradient needs finite p.
double objective_f(const ComplexVector& x, double p, double q);

/// Lower-bound constant c = N·‖x_inf‖∞²/‖x_ls‖₂² for the product
/// PAR(x)·PINC(x) over all solutions of the system; x_inf must be a
/// converged minimum-ℓ∞-norm solution and x_ls the least-squares solution.
double tradeoff_constant(const LinearSystem& sys, const ComplexVector& x_inf,
                         const ComplexVector& x_ls);

/// All figures of merit for one iterate, PINC taken against x_ls.
struct ParReport {
  double par = 0.0;
  double par_db = 0.0;
  double pinc = 0.0;
  double pinc_db = 0.0;
  double par_pq = 0.0;
  double objective = 0.0;
};

ParReport make_par_report(const ComplexVector& x, const ComplexVector& x_ls,
                          double p, double q);

/// Sample collection with nearest-rank percentile queries.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples);

  void add(double sample) { samples_.push_back(sample); }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }

  /// Nearest-rank quantile: the ⌈pct/100·n⌉-th smallest sample, 0 < pct < 100.
  double percentile(double pct) const;

  /// Empirical P(Z > z).
  double ccdf(double z) const;

 private:
  std::vector<double> samples_;
};

double percentile(const EmpiricalDistribution& dist, double pct);

}  // namespace parqo
