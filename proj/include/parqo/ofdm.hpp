#pragma once

#include <Eigen/Cholesky>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "parqo/errors.hpp"
#include "parqo/metrics.hpp"

namespace parqo {

// Grid conventions: a frequency-domain grid X is antennas × tones (column w
// holds the per-antenna symbol of tone w); a time-domain grid T is
// tones × antennas (column b holds antenna b's samples). Tone indices are
// 1-based and tone 1 is the DC bin; the axis is not fft-shifted.

/// Partition of the W OFDM tones into used and unused sets.
struct TonePlan {
  int total = 0;
  std::vector<int> used;  // sorted, unique, 1-based

  int used_count() const { return static_cast<int>(used.size()); }
  std::vector<int> unused() const;
  bool is_used(int tone) const;
};

/// 600 data tones on each side of DC, DC itself unused: standard 20 MHz
/// numerology at W = 2048 (1200 used tones). Requires W ≥ 1201.
TonePlan lte20_tone_plan(int total_tones = 2048);

TonePlan custom_tone_plan(int total_tones, std::vector<int> used_tones);

/// Multi-tap MIMO channel: L time-domain tap matrices (users × antennas) and
/// their per-tone DFT H_w = Σ_t taps[t]·exp(−2πi(w−1)(t−1)/W), stored for
/// all W tones.
struct ChannelRealization {
  int users = 0;
  int antennas = 0;
  int total_tones = 0;
  std::vector<ComplexMatrix> taps;
  std::vector<ComplexMatrix> tone_response;
};

/// Taps are i.i.d. circularly-symmetric complex Gaussian with variance 1/L,
/// which makes each per-tone response entry unit variance.
/// unit_tap_variance = true draws variance-1 taps instead. Deterministic in
/// the seed.
ChannelRealization gen_channel(int antennas, int users, int total_tones,
                               int taps, std::uint64_t seed,
                               bool unit_tap_variance = false);

/// T = Fᴴ·Xᵀ with F the unitary DFT: antennas × tones in, tones × antennas
/// out. Preserves Frobenius norm.
ComplexMatrix freq_to_time(const ComplexMatrix& freq_grid);

/// X = (F·T)ᵀ, exact inverse of freq_to_time.
ComplexMatrix time_to_freq(const ComplexMatrix& time_grid);

/// 16-QAM with unit average symbol energy ({±1, ±3}/√10 per real dimension).
const std::vector<std::complex<double>>& qam16_constellation();

/// users × tones grid: used-tone columns hold uniformly drawn constellation
/// points, unused-tone columns are zero. Deterministic in the seed.
ComplexMatrix make_symbol_grid(
    int users, const TonePlan& plan, std::uint64_t seed,
    const std::vector<std::complex<double>>& constellation =
        qam16_constellation());

/// Per-tone affine projector onto the precoding constraints
/// {H_w·x_w = s_w for used w, x_w = 0 for unused w}, with each used tone's
/// Gram factor H_w·H_wᴴ computed once and reused. Holds references: symbols,
/// channel, and plan must outlive the projector.
class TonewiseProjector {
 public:
  TonewiseProjector(const ComplexMatrix& symbols,
                    const ChannelRealization& chan, const TonePlan& plan);

  /// Column-wise projection; unused-tone columns are set to exact zero.
  ComplexMatrix project(const ComplexMatrix& freq_grid) const;

  /// project of the zero grid: the least-squares precoder output.
  ComplexMatrix least_squares() const;

  /// Max over used tones of ‖H_w·x_w − s_w‖₂/‖s_w‖₂.
  double evm_residual(const ComplexMatrix& freq_grid) const;

  /// Total energy on unused-tone columns.
  double oob_energy(const ComplexMatrix& freq_grid) const;

  const TonePlan& plan() const { return *plan_; }
  int antennas() const { return antennas_; }

 private:
  const ComplexMatrix* symbols_;
  const ChannelRealization* chan_;
  const TonePlan* plan_;
  int antennas_ = 0;
  std::vector<Eigen::LLT<ComplexMatrix>> gram_llt_;  // one per used tone
};

/// Least-squares precoding: X[:, w] = H_wᴴ(H_w·H_wᴴ)⁻¹·s_w on used tones,
/// exact zero elsewhere. Zero EVM by construction.
ComplexMatrix ls_precode(const ComplexMatrix& symbols,
                         const ChannelRealization& chan, const TonePlan& plan);

/// Scales the grid to unit total power; returns the scaled grid and the
/// pre-normalization power ‖X‖_F².
std::pair<ComplexMatrix, double> normalize_power(const ComplexMatrix& freq_grid);

// Binary containers for replaying grids and channels across runs. Layout is
// little-endian: a 4-byte magic, uint32 dimensions, then row-major
// (re, im) float64 pairs. Channels store only the taps; the per-tone
// response is rebuilt on load.
void save_complex_matrix(const std::filesystem::path& path,
                         const ComplexMatrix& m);
ComplexMatrix load_complex_matrix(const std::filesystem::path& path);
void save_channel(const std::filesystem::path& path,
                  const ChannelRealization& chan);
ChannelRealization load_channel(const std::filesystem::path& path);

}  // namespace parqo
