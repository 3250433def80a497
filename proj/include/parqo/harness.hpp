#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "parqo/jpp.hpp"
#include "parqo/solvers.hpp"

namespace parqo {

struct AlgorithmSpec {
  enum class Kind { lplq, linf };
  Kind kind = Kind::lplq;
  double p = 4.0;
  double q = 2.0;

  std::string label() const;  // "lplq:4:2", "linf"
};

/// Parses "lplq:<p>:<q>" or "linf"; throws std::invalid_argument otherwise.
AlgorithmSpec parse_algorithm(std::string_view text);
std::vector<AlgorithmSpec> parse_algorithm_list(std::string_view comma_list);

struct GaussianDims {
  int equations = 100;
  int unknowns = 200;
};

struct MimoDims {
  int antennas = 128;
  int users = 16;
  int total_tones = 2048;
  int taps = 4;
  std::string plan = "lte20";       // "lte20" or "custom"
  std::vector<int> custom_tones{};  // used when plan == "custom"
};

struct ExperimentConfig {
  std::variant<GaussianDims, MimoDims> setup = GaussianDims{};
  std::vector<AlgorithmSpec> algorithms;
  int k_max = 20;
  int trials = 1;
  std::uint64_t seed = 1;
  double percentile = 99.0;
  /// Concurrent trial workers; 0 means one per hardware thread.
  int workers = 0;
  /// Iteration count of the converged ℓ∞ reference run that sets the
  /// trade-off bound (gaussian experiments only).
  int bound_iterations = 100000;
  /// Forwarded to SolverConfig::objective_exit (gaussian experiments).
  double objective_exit = 0.0;

  void validate() const;
};

struct CurvePoint {
  int iteration = 0;
  double par_db = 0.0;
  double pinc_db = 0.0;
  double objective_mean = 0.0;
};

struct AlgorithmCurve {
  AlgorithmSpec algorithm;
  std::vector<CurvePoint> points;
};

/// Worst-case constraint residuals observed across all trials and iterates.
struct InvariantStats {
  double max_feas_residual = 0.0;
  double max_evm = 0.0;
  double max_oob = 0.0;
  double max_parseval_gap = 0.0;
};

struct TradeoffCurve {
  std::vector<AlgorithmCurve> algorithms;
  /// 10·log10 of the PAR·PINC lower bound; NaN when not computed (mimo).
  double bound_db = 0.0;
  double percentile = 99.0;
  InvariantStats invariants;
  ExperimentConfig config;
};

/// Per trial, draws A (M×N) and y from circularly-symmetric unit-variance
/// complex Gaussians and runs every configured solver; aggregates PAR and
/// PINC per iteration at the configured percentile (raw values for a single
/// trial) and sets bound_db from a converged DRS run.
TradeoffCurve run_gaussian_experiment(const ExperimentConfig& cfg);

/// Per trial, draws a fresh channel and symbol grid from (seed, trial,
/// purpose) streams and runs every configured algorithm for k_max
/// iterations. PAR samples are pooled over antennas (B per trial per
/// iteration); PINC is one sample per trial.
TradeoffCurve run_mimo_experiment(const ExperimentConfig& cfg);

enum class OutputFormat { csv, json };

/// Writes the curve. CSV header:
///   algorithm,iteration,par_db_pXX,pinc_db_pXX,objective_mean,bound_db
/// with XX the configured percentile and 6-decimal floats. JSON carries the
/// same fields plus the config echo and library version.
void emit_results(const TradeoffCurve& curve, const std::filesystem::path& path,
                  OutputFormat format);

/// Reads back a JSON results file (curve data, percentile, bound).
TradeoffCurve read_results_json(const std::filesystem::path& path);

}  // namespace parqo
