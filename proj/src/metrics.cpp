#include "parqo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parqo/solvers.hpp"

namespace parqo {

double to_db(double linear) { return 10.0 * std::log10(linear); }

double from_db(double db) { return std::pow(10.0, db / 10.0); }

namespace {

double max_magnitude(const ComplexVector& x) { return x.cwiseAbs().maxCoeff(); }

void require_nonzero(const ComplexVector& x, const char* who) {
  if (x.size() == 0 || max_magnitude(x) == 0.0)
    throw std::domain_error(std::string(who) + ": undefined for the zero vector");
}

void require_valid_pq(double p, double q, bool finite_p, const char* who) {
  if (!(q >= 1.0) || !(q < p))
    throw std::domain_error(std::string(who) + ": requires 1 <= q < p");
  if (finite_p && std::isinf(p))
    throw std::domain_error(std::string(who) + ": requires finite p");
}

}  // namespace

double lp_norm(const ComplexVector& x, double p) {
  if (x.size() == 0) throw std::domain_error("lp_norm: empty vector");
  if (!(p >= 1.0)) throw std::domain_error("lp_norm: requires p >= 1");
  if (std::isinf(p)) return max_magnitude(x);
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.cwiseAbs().sum();

  const double peak = max_magnitude(x);
  if (peak == 0.0) return 0.0;
  const Eigen::ArrayXd scaled = x.cwiseAbs().array() / peak;
  double sum;
  if (p == 4.0)
    sum = scaled.square().square().sum();
  else if (p == 3.0)
    sum = (scaled * scaled * scaled).sum();
  else
    sum = scaled.pow(p).sum();
  return peak * std::pow(sum, 1.0 / p);
}

double par(const ComplexVector& x) {
  require_nonzero(x, "par");
  const double ratio = max_magnitude(x) / x.norm();
  return static_cast<double>(x.size()) * ratio * ratio;
}

bool is_min_par(const ComplexVector& x, double tol) {
  require_nonzero(x, "is_min_par");
  if (tol < 0.0) throw std::domain_error("is_min_par: requires tol >= 0");
  const Eigen::ArrayXd mags = x.cwiseAbs().array();
  const double hi = mags.maxCoeff();
  const double lo = mags.minCoeff();
  return hi - lo <= tol * hi;
}

double pinc(const ComplexVector& x, const ComplexVector& x_ls) {
  require_nonzero(x_ls, "pinc");
  const double ref = x_ls.squaredNorm();
  return x.squaredNorm() / ref;
}

double par_pq(const ComplexVector& x, double p, double q) {
  require_nonzero(x, "par_pq");
  require_valid_pq(p, q, /*finite_p=*/false, "par_pq");
  const double np = lp_norm(x, p);
  const double nq = lp_norm(x, q);
  const double scale = std::pow(static_cast<double>(x.size()), 2.0 / q - 2.0 / p);
  const double ratio = np / nq;
  return scale * ratio * ratio;
}

double objective_f(const ComplexVector& x, double p, double q) {
  require_valid_pq(p, q, /*finite_p=*/true, "objective_f");
  if (x.size() == 0) return 0.0;
  const double np = lp_norm(x, p);
  const double nq = lp_norm(x, q);
  const double scale = std::pow(static_cast<double>(x.size()), 2.0 / q - 2.0 / p);
  return scale * np * np - nq * nq;
}

double tradeoff_constant(const LinearSystem& sys, const ComplexVector& x_inf,
                         const ComplexVector& x_ls) {
  if (sys.y().size() == 0 || sys.y().cwiseAbs().maxCoeff() == 0.0)
    throw std::domain_error("tradeoff_constant: undefined for y = 0");
  if (x_inf.size() != sys.unknowns() || x_ls.size() != sys.unknowns())
    throw std::invalid_argument("tradeoff_constant: size mismatch with system");
  const double peak = max_magnitude(x_inf);
  return static_cast<double>(sys.unknowns()) * peak * peak / x_ls.squaredNorm();
}

ParReport make_par_report(const ComplexVector& x, const ComplexVector& x_ls,
                          double p, double q) {
  ParReport r;
  r.par = par(x);
  r.par_db = to_db(r.par);
  r.pinc = pinc(x, x_ls);
  r.pinc_db = to_db(r.pinc);
  r.par_pq = par_pq(x, p, q);
  r.objective = objective_f(x, p, q);
  return r;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {}

double EmpiricalDistribution::percentile(double pct) const {
  if (samples_.empty())
    throw std::domain_error("percentile: empty sample set");
  if (!(pct > 0.0) || !(pct < 100.0))
    throw std::domain_error("percentile: requires 0 < pct < 100");
  const auto n = samples_.size();
  auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::vector<double> sorted(samples_);
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1];
}

double EmpiricalDistribution::ccdf(double z) const {
  if (samples_.empty()) throw std::domain_error("ccdf: empty sample set");
  const auto above = std::count_if(samples_.begin(), samples_.end(),
                                   [z](double s) { return s > z; });
  return static_cast<double>(above) / static_cast<double>(samples_.size());
}

double percentile(const EmpiricalDistribution& dist, double pct) {
  return dist.percentile(pct);
}

}  // namespace parqo
