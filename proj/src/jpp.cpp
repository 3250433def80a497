#include "parqo/jpp.hpp"

#include <cmath>
#include <stdexcept>

namespace parqo {

namespace {

constexpr double kTauProbeFloor = 0x1.0p-40;

double grid_objective(const ComplexMatrix& time_grid, double p, double q) {
  double total = 0.0;
  for (Eigen::Index b = 0; b < time_grid.cols(); ++b)
    total += objective_f(time_grid.col(b), p, q);
  return total;
}

JppIterationRecord make_record(int k, const ComplexMatrix& time_grid,
                               const ComplexMatrix& freq_grid,
                               double ls_power, const TonewiseProjector& proj,
                               double p, double q) {
  JppIterationRecord rec;
  rec.iteration = k;
  rec.par_per_antenna.reserve(time_grid.cols());
  for (Eigen::Index b = 0; b < time_grid.cols(); ++b)
    rec.par_per_antenna.push_back(par(time_grid.col(b)));
  rec.pinc = time_grid.squaredNorm() / ls_power;
  rec.objective = grid_objective(time_grid, p, q);
  rec.evm_residual = proj.evm_residual(freq_grid);
  rec.oob_energy = proj.oob_energy(freq_grid);
  const double freq_norm = freq_grid.norm();
  rec.parseval_gap = freq_norm > 0.0
                         ? std::abs(time_grid.norm() - freq_norm) / freq_norm
                         : std::abs(time_grid.norm());
  return rec;
}

ComplexMatrix columnwise_prox_linf(const ComplexMatrix& grid, double weight) {
  ComplexMatrix out(grid.rows(), grid.cols());
  for (Eigen::Index b = 0; b < grid.cols(); ++b)
    out.col(b) = prox_linf(grid.col(b), weight);
  return out;
}

}  // namespace

void JppConfig::validate() const {
  if (solver == Solver::lplq && (!(q >= 1.0) || !(q < p) || std::isinf(p)))
    throw std::invalid_argument("JppConfig: requires 1 <= q < p < inf");
  if (k_max < 1) throw std::invalid_argument("JppConfig: requires k_max >= 1");
  if (!(feas_tol > 0.0))
    throw std::invalid_argument("JppConfig: requires feas_tol > 0");
  if (tau && !(*tau > 0.0))
    throw std::invalid_argument("JppConfig: requires tau > 0");
}

ComplexMatrix jpp_project(const ComplexMatrix& freq_grid,
                          const ComplexMatrix& symbols,
                          const ChannelRealization& chan,
                          const TonePlan& plan) {
  return TonewiseProjector(symbols, chan, plan).project(freq_grid);
}

ComplexMatrix jpp_gradient(const ComplexMatrix& time_grid, double p, double q) {
  ComplexMatrix grad(time_grid.rows(), time_grid.cols());
  for (Eigen::Index b = 0; b < time_grid.cols(); ++b)
    grad.col(b) = grad_lplq(time_grid.col(b), p, q);
  return grad;
}

JppResult solve_jpp(const ComplexMatrix& symbols,
                    const ChannelRealization& chan, const TonePlan& plan,
                    const JppConfig& cfg) {
  cfg.validate();
  const TonewiseProjector proj(symbols, chan, plan);

  JppResult result;
  result.config = cfg;
  result.freq_grid = proj.least_squares();
  result.time_grid = freq_to_time(result.freq_grid);
  const double ls_power = result.time_grid.squaredNorm();

  auto record = [&](int k) {
    if (cfg.record_trace)
      result.trace.push_back(make_record(k, result.time_grid, result.freq_grid,
                                         ls_power, proj, cfg.p, cfg.q));
  };

  if (cfg.solver == JppConfig::Solver::lplq) {
    // One forward-backward step: gradient in time, constraints in frequency.
    auto step = [&](const ComplexMatrix& t, const ComplexMatrix& g, double tau) {
      ComplexMatrix x = proj.project(time_to_freq(t - tau * g));
      return std::pair{freq_to_time(x), std::move(x)};
    };

    if (cfg.tau) {
      result.tau_used = *cfg.tau;
    } else {
      // Halving probe on the first step, shared across all antennas.
      const double f0 = grid_objective(result.time_grid, cfg.p, cfg.q);
      const ComplexMatrix grad0 = jpp_gradient(result.time_grid, cfg.p, cfg.q);
      result.tau_used = kTauProbeFloor;
      result.step_warning = true;
      for (double tau = 1.0; tau >= kTauProbeFloor; tau *= 0.5) {
        const auto [t1, x1] = step(result.time_grid, grad0, tau);
        if (grid_objective(t1, cfg.p, cfg.q) < f0) {
          result.tau_used = tau;
          result.step_warning = false;
          break;
        }
      }
    }

    record(1);
    for (int k = 2; k <= cfg.k_max; ++k) {
      const ComplexMatrix grad = jpp_gradient(result.time_grid, cfg.p, cfg.q);
      auto [t, x] = step(result.time_grid, grad, result.tau_used);
      result.time_grid = std::move(t);
      result.freq_grid = std::move(x);
      record(k);
    }
  } else {
    // Douglas-Rachford with the column-separable ℓ∞ prox (penalty
    // Σ_b ‖t_b‖∞). Starting from state 0 makes iterate 1 the LS output.
    const double weight =
        cfg.tau ? *cfg.tau
                : symbols.norm() / std::sqrt(static_cast<double>(
                                       chan.users * plan.used_count()));
    result.tau_used = weight;

    ComplexMatrix state = ComplexMatrix::Zero(result.time_grid.rows(),
                                              result.time_grid.cols());
    for (int k = 1; k <= cfg.k_max; ++k) {
      const ComplexMatrix u = columnwise_prox_linf(state, weight);
      result.freq_grid = proj.project(time_to_freq(2.0 * u - state));
      result.time_grid = freq_to_time(result.freq_grid);
      state += result.time_grid - u;
      record(k);
    }
  }
  return result;
}

std::vector<JppIterationRecord> evaluate_jpp(const JppResult& result,
                                             const ComplexMatrix& symbols,
                                             const ChannelRealization& chan,
                                             const TonePlan& plan,
                                             const ComplexMatrix& time_grid_ls) {
  if (result.trace.empty())
    throw std::invalid_argument("evaluate_jpp: result trace is empty");
  const TonewiseProjector proj(symbols, chan, plan);

  // Recompute the final iterate's figures from the stored grids; earlier
  // iterations keep the records taken during the solve.
  std::vector<JppIterationRecord> records = result.trace;
  records.back() =
      make_record(result.trace.back().iteration, result.time_grid,
                  result.freq_grid, time_grid_ls.squaredNorm(), proj,
                  result.config.p, result.config.q);
  return records;
}

}  // namespace parqo
