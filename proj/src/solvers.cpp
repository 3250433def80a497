#include "parqo/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace parqo {

namespace {

constexpr double kTauProbeFloor = 0x1.0p-40;
constexpr double kZeroEntry = 1e-300;

IterRecord make_record(int k, const ComplexVector& x, const ComplexVector& x_ls,
                       const SolverConfig& cfg) {
  IterRecord rec;
  rec.iteration = k;
  rec.report = make_par_report(x, x_ls, cfg.p, cfg.q);
  rec.objective = rec.report.objective;
  return rec;
}

}  // namespace

LinearSystem::LinearSystem(ComplexMatrix a, ComplexVector y)
    : a_(std::move(a)), y_(std::move(y)) {
  if (a_.rows() < 1 || a_.cols() < 1)
    throw std::invalid_argument("LinearSystem: empty matrix");
  if (a_.rows() > a_.cols())
    throw std::invalid_argument("LinearSystem: requires M <= N");
  if (y_.size() != a_.rows())
    throw std::invalid_argument("LinearSystem: y length must match rows of A");

  const ComplexMatrix gram = a_ * a_.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eigs(gram,
                                                    Eigen::EigenvaluesOnly);
  const double lo = eigs.eigenvalues().minCoeff();
  const double hi = eigs.eigenvalues().maxCoeff();
  gram_condition_ = (lo > 0.0) ? hi / lo : kInf;
  if (!(lo > 0.0) || gram_condition_ > kMaxGramCondition)
    throw SingularSystemError("LinearSystem: A*A^H is singular or "
                              "ill-conditioned (cond > 1e12)");
  gram_llt_.compute(gram);
  if (gram_llt_.info() != Eigen::Success)
    throw SingularSystemError("LinearSystem: Cholesky factorization failed");
}

ComplexVector LinearSystem::project(const ComplexVector& z) const {
  ComplexVector residual = a_ * z - y_;
  return z - a_.adjoint() * gram_llt_.solve(residual);
}

double LinearSystem::residual(const ComplexVector& x) const {
  const double ref = y_.norm();
  const double err = (a_ * x - y_).norm();
  return ref > 0.0 ? err / ref : err;
}

ComplexVector affine_project(const ComplexVector& z, const LinearSystem& sys) {
  return sys.project(z);
}

ComplexVector solve_ls(const LinearSystem& sys) {
  return sys.project(ComplexVector::Zero(sys.unknowns()));
}

void SolverConfig::validate(bool require_finite_p) const {
  if (!(q >= 1.0) || !(q < p))
    throw std::invalid_argument("SolverConfig: requires 1 <= q < p");
  if (require_finite_p && std::isinf(p))
    throw std::invalid_argument("SolverConfig: requires finite p");
  if (k_max < 1) throw std::invalid_argument("SolverConfig: requires k_max >= 1");
  if (!(feas_tol > 0.0))
    throw std::invalid_argument("SolverConfig: requires feas_tol > 0");
  if (tau && !(*tau > 0.0))
    throw std::invalid_argument("SolverConfig: requires tau > 0");
}

namespace {

// |x_i|^e with the fast paths the solvers actually hit:
// e in {-1, 0, 1, 2} for (p, q) in {(4,2), (3,2), (2,1)}.
Eigen::ArrayXd entrywise_power(const Eigen::ArrayXd& a, double e) {
  if (e == 0.0) return Eigen::ArrayXd::Ones(a.size());
  if (e == 1.0) return a;
  if (e == 2.0) return a.square();
  if (e == -1.0) return a.inverse();
  return a.pow(e);
}

}  // namespace

ComplexVector grad_lplq(const ComplexVector& x, double p, double q) {
  if (!(q >= 1.0) || !(q < p) || std::isinf(p))
    throw std::domain_error("grad_lplq: requires 1 <= q < p < inf");
  const auto n = x.size();
  if (n == 0) return x;

  const Eigen::ArrayXd mags = x.cwiseAbs().array();
  if (mags.maxCoeff() < kZeroEntry) return ComplexVector::Zero(n);

  const double np = lp_norm(x, p);
  const double nq = lp_norm(x, q);
  const double scale = std::pow(static_cast<double>(n), 2.0 / q - 2.0 / p);

  // scale·‖x‖p^(2−p)·|x_i|^(p−2) = scale·(|x_i|/‖x‖p)^(p−2), and likewise
  // for the q term; the ratio form keeps intermediates near 1.
  const Eigen::ArrayXd coeff = scale * entrywise_power(mags / np, p - 2.0) -
                               entrywise_power(mags / nq, q - 2.0);

  ComplexVector grad = (x.array() * coeff.cast<std::complex<double>>()).matrix();
  if ((mags < kZeroEntry).any()) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (mags[i] < kZeroEntry) grad[i] = 0.0;
  }
  return grad;
}

StepProbe probe_step_size(const LinearSystem& sys, const ComplexVector& x0,
                          const SolverConfig& cfg) {
  cfg.validate(/*require_finite_p=*/true);
  const double f0 = objective_f(x0, cfg.p, cfg.q);
  const ComplexVector grad = grad_lplq(x0, cfg.p, cfg.q);
  for (double tau = 1.0; tau >= kTauProbeFloor; tau *= 0.5) {
    const ComplexVector next = sys.project(x0 - tau * grad);
    if (objective_f(next, cfg.p, cfg.q) < f0) return {tau, true};
  }
  return {kTauProbeFloor, false};
}

SolveResult solve_fbs_lplq(const LinearSystem& sys, const SolverConfig& cfg) {
  cfg.validate(/*require_finite_p=*/true);

  SolveResult result;
  result.x = solve_ls(sys);
  const ComplexVector x_ls = result.x;

  if (cfg.tau) {
    result.tau_used = *cfg.tau;
  } else {
    const StepProbe probe = probe_step_size(sys, result.x, cfg);
    result.tau_used = probe.tau;
    result.step_warning = !probe.decreased;
  }

  if (cfg.record_trace) result.trace.push_back(make_record(1, result.x, x_ls, cfg));

  for (int k = 2; k <= cfg.k_max; ++k) {
    result.x = sys.project(result.x - result.tau_used *
                                          grad_lplq(result.x, cfg.p, cfg.q));
    double objective;
    if (cfg.record_trace) {
      result.trace.push_back(make_record(k, result.x, x_ls, cfg));
      objective = result.trace.back().objective;
    } else {
      objective = objective_f(result.x, cfg.p, cfg.q);
    }
    if (cfg.objective_exit > 0.0 && objective < cfg.objective_exit) break;
  }
  return result;
}

ComplexVector project_l1_ball(const ComplexVector& v, double radius) {
  if (!(radius > 0.0))
    throw std::domain_error("project_l1_ball: requires radius > 0");
  const Eigen::ArrayXd mags = v.cwiseAbs().array();
  if (mags.sum() <= radius) return v;

  // Sort-and-scan for the threshold: with u the magnitudes in descending
  // order, the active set is the largest k with u_k > (Σ_{j<=k} u_j − r)/k.
  std::vector<double> sorted(mags.data(), mags.data() + mags.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (sorted[k] > candidate)
      theta = candidate;
    else
      break;
  }

  ComplexVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = mags[i];
    out[i] = (m > theta) ? v[i] * ((m - theta) / m) : 0.0;
  }
  return out;
}

ComplexVector prox_linf(const ComplexVector& z, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("prox_linf: requires tau > 0");
  return z - project_l1_ball(z, tau);
}

SolveResult solve_drs_linf(const LinearSystem& sys, const SolverConfig& cfg) {
  cfg.validate(/*require_finite_p=*/false);

  SolveResult result;
  const double weight =
      cfg.tau ? *cfg.tau
              : sys.y().norm() / std::sqrt(static_cast<double>(sys.equations()));
  result.tau_used = weight;

  // Plain Douglas-Rachford (relaxation 1) on ‖·‖∞ + the affine constraint.
  // Starting from z = 0 makes the first reported iterate the LS solution.
  ComplexVector z = ComplexVector::Zero(sys.unknowns());
  ComplexVector x_ls;
  for (int k = 1; k <= cfg.k_max; ++k) {
    const ComplexVector u = prox_linf(z, weight);
    const ComplexVector v = sys.project(2.0 * u - z);
    z += v - u;
    result.x = v;
    if (k == 1) x_ls = v;
    if (cfg.record_trace) result.trace.push_back(make_record(k, v, x_ls, cfg));
  }
  return result;
}

}  // namespace parqo
