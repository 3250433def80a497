#pragma once

#include <optional>
#include <vector>

#include "parqo/ofdm.hpp"
#include "parqo/solvers.hpp"

namespace parqo {

/// Joint precoding and PAR reduction: shape the time-domain grid to lower
/// per-antenna PAR while keeping every used tone's symbols exact (zero EVM)
/// and every unused tone exactly silent (zero OOB energy).
struct JppConfig {
  enum class Solver { lplq, linf };
  Solver solver = Solver::lplq;
  double p = 4.0;
  double q = 2.0;
  /// Step size (lplq) or proximal weight (linf); empty selects the
  /// automatic choice, as in SolverConfig.
  std::optional<double> tau{};
  int k_max = 20;
  double feas_tol = 1e-10;
  bool record_trace = true;

  void validate() const;
};

struct JppIterationRecord {
  int iteration = 0;  // 1-based; iteration 1 is the LS precoder output
  std::vector<double> par_per_antenna;
  double pinc = 0.0;       // ‖T‖_F²/‖T_ls‖_F²
  double objective = 0.0;  // Σ_b objective_f(t_b, p, q)
  double evm_residual = 0.0;
  double oob_energy = 0.0;
  double parseval_gap = 0.0;  // |‖T‖_F − ‖X‖_F| / ‖X‖_F
};

struct JppResult {
  ComplexMatrix time_grid;  // tones × antennas
  ComplexMatrix freq_grid;  // antennas × tones
  std::vector<JppIterationRecord> trace;
  JppConfig config;
  double tau_used = 0.0;
  bool step_warning = false;
};

/// Per-tone projection of a frequency grid onto the precoding constraints;
/// builds the tone factorizations on every call. Solvers use a cached
/// TonewiseProjector instead.
ComplexMatrix jpp_project(const ComplexMatrix& freq_grid,
                          const ComplexMatrix& symbols,
                          const ChannelRealization& chan,
                          const TonePlan& plan);

/// Column-separable gradient: column b is grad_lplq(t_b, p, q) with N the
/// tone count.
ComplexMatrix jpp_gradient(const ComplexMatrix& time_grid, double p, double q);

/// Runs k_max iterations from the LS precoder output. lplq alternates a
/// time-domain gradient step with the per-tone projection (through the
/// unitary transforms); linf runs Douglas-Rachford with the per-antenna
/// ℓ∞ prox. Every recorded iterate satisfies the precoding constraints.
JppResult solve_jpp(const ComplexMatrix& symbols,
                    const ChannelRealization& chan, const TonePlan& plan,
                    const JppConfig& cfg);

/// Re-derives the final iterate's metrics from the stored grids (guarding
/// trace integrity) and returns the per-iteration records.
std::vector<JppIterationRecord> evaluate_jpp(const JppResult& result,
                                             const ComplexMatrix& symbols,
                                             const ChannelRealization& chan,
                                             const TonePlan& plan,
                                             const ComplexMatrix& time_grid_ls);

}  // namespace parqo
