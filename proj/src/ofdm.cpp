#include "parqo/ofdm.hpp"

#include <unsupported/Eigen/FFT>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "parqo/rng.hpp"
#include "parqo/solvers.hpp"

namespace parqo {

std::vector<int> TonePlan::unused() const {
  std::vector<int> out;
  out.reserve(total - used_count());
  auto it = used.begin();
  for (int w = 1; w <= total; ++w) {
    if (it != used.end() && *it == w)
      ++it;
    else
      out.push_back(w);
  }
  return out;
}

bool TonePlan::is_used(int tone) const {
  return std::binary_search(used.begin(), used.end(), tone);
}

TonePlan lte20_tone_plan(int total_tones) {
  if (total_tones < 1201)
    throw std::invalid_argument("lte20_tone_plan: requires at least 1201 tones");
  TonePlan plan;
  plan.total = total_tones;
  plan.used.reserve(1200);
  for (int w = 2; w <= 601; ++w) plan.used.push_back(w);        // +1 .. +600
  for (int w = total_tones - 599; w <= total_tones; ++w)        // -600 .. -1
    plan.used.push_back(w);
  return plan;
}

TonePlan custom_tone_plan(int total_tones, std::vector<int> used_tones) {
  if (total_tones < 2)
    throw std::invalid_argument("custom_tone_plan: requires W >= 2");
  std::sort(used_tones.begin(), used_tones.end());
  used_tones.erase(std::unique(used_tones.begin(), used_tones.end()),
                   used_tones.end());
  if (used_tones.empty())
    throw std::invalid_argument("custom_tone_plan: used set must be nonempty");
  if (used_tones.front() < 1 || used_tones.back() > total_tones)
    throw std::invalid_argument("custom_tone_plan: tone index out of range");
  TonePlan plan;
  plan.total = total_tones;
  plan.used = std::move(used_tones);
  return plan;
}

namespace {

std::vector<ComplexMatrix> tone_response_from_taps(
    const std::vector<ComplexMatrix>& taps, int total_tones) {
  const auto users = taps.front().rows();
  const auto antennas = taps.front().cols();
  std::vector<ComplexMatrix> response(total_tones);
  for (int w = 0; w < total_tones; ++w) {
    ComplexMatrix h = ComplexMatrix::Zero(users, antennas);
    for (std::size_t t = 0; t < taps.size(); ++t) {
      const double angle = -2.0 * M_PI * static_cast<double>(w) *
                           static_cast<double>(t) / total_tones;
      h.noalias() += std::polar(1.0, angle) * taps[t];
    }
    response[w] = std::move(h);
  }
  return response;
}

}  // namespace

ChannelRealization gen_channel(int antennas, int users, int total_tones,
                               int taps, std::uint64_t seed,
                               bool unit_tap_variance) {
  if (users < 1 || antennas < 1)
    throw std::invalid_argument("gen_channel: dimensions must be positive");
  if (users >= antennas)
    throw std::invalid_argument("gen_channel: requires U < B (fat per-tone channel)");
  if (taps < 1 || taps > total_tones)
    throw std::invalid_argument("gen_channel: requires 1 <= L <= W");

  ChannelRealization chan;
  chan.users = users;
  chan.antennas = antennas;
  chan.total_tones = total_tones;

  RandomStream rng(seed);
  const double sigma = unit_tap_variance ? 1.0 : 1.0 / std::sqrt(taps);
  chan.taps.reserve(taps);
  for (int t = 0; t < taps; ++t) {
    ComplexMatrix tap(users, antennas);
    for (int b = 0; b < antennas; ++b)
      for (int u = 0; u < users; ++u) tap(u, b) = sigma * rng.complex_gaussian();
    chan.taps.push_back(std::move(tap));
  }
  chan.tone_response = tone_response_from_taps(chan.taps, total_tones);
  return chan;
}

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace

ComplexMatrix freq_to_time(const ComplexMatrix& freq_grid) {
  const auto antennas = freq_grid.rows();
  const auto tones = freq_grid.cols();
  const double root_w = std::sqrt(static_cast<double>(tones));
  ComplexMatrix time_grid(tones, antennas);
  ComplexVector in(tones), out(tones);
  for (Eigen::Index b = 0; b < antennas; ++b) {
    in = freq_grid.row(b).transpose();
    fft_engine().inv(out, in);
    time_grid.col(b) = out * root_w;
  }
  return time_grid;
}

ComplexMatrix time_to_freq(const ComplexMatrix& time_grid) {
  const auto tones = time_grid.rows();
  const auto antennas = time_grid.cols();
  const double inv_root_w = 1.0 / std::sqrt(static_cast<double>(tones));
  ComplexMatrix freq_grid(antennas, tones);
  ComplexVector in(tones), out(tones);
  for (Eigen::Index b = 0; b < antennas; ++b) {
    in = time_grid.col(b);
    fft_engine().fwd(out, in);
    freq_grid.row(b) = (out * inv_root_w).transpose();
  }
  return freq_grid;
}

const std::vector<std::complex<double>>& qam16_constellation() {
  static const std::vector<std::complex<double>> points = [] {
    std::vector<std::complex<double>> pts;
    const double levels[] = {-3.0, -1.0, 1.0, 3.0};
    const double scale = 1.0 / std::sqrt(10.0);  // unit average energy
    for (double re : levels)
      for (double im : levels) pts.emplace_back(re * scale, im * scale);
    return pts;
  }();
  return points;
}

ComplexMatrix make_symbol_grid(
    int users, const TonePlan& plan, std::uint64_t seed,
    const std::vector<std::complex<double>>& constellation) {
  if (users < 1) throw std::invalid_argument("make_symbol_grid: users >= 1");
  if (constellation.empty())
    throw std::invalid_argument("make_symbol_grid: empty constellation");
  ComplexMatrix s = ComplexMatrix::Zero(users, plan.total);
  RandomStream rng(seed);
  for (int w : plan.used)
    for (int u = 0; u < users; ++u)
      s(u, w - 1) = constellation[rng.below(constellation.size())];
  return s;
}

TonewiseProjector::TonewiseProjector(const ComplexMatrix& symbols,
                                     const ChannelRealization& chan,
                                     const TonePlan& plan)
    : symbols_(&symbols), chan_(&chan), plan_(&plan), antennas_(chan.antennas) {
  if (plan.total != chan.total_tones)
    throw std::invalid_argument("TonewiseProjector: plan/channel tone mismatch");
  if (symbols.rows() != chan.users || symbols.cols() != chan.total_tones)
    throw std::invalid_argument("TonewiseProjector: symbol grid shape mismatch");

  gram_llt_.resize(plan.used.size());
  for (std::size_t i = 0; i < plan.used.size(); ++i) {
    const ComplexMatrix& h = chan.tone_response[plan.used[i] - 1];
    const ComplexMatrix gram = h * h.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eigs(gram,
                                                      Eigen::EigenvaluesOnly);
    const double lo = eigs.eigenvalues().minCoeff();
    const double hi = eigs.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxGramCondition)
      throw SingularSystemError("TonewiseProjector: singular Gram matrix at tone " +
                                std::to_string(plan.used[i]));
    gram_llt_[i].compute(gram);
    if (gram_llt_[i].info() != Eigen::Success)
      throw SingularSystemError("TonewiseProjector: factorization failed at tone " +
                                std::to_string(plan.used[i]));
  }
}

ComplexMatrix TonewiseProjector::project(const ComplexMatrix& freq_grid) const {
  if (freq_grid.rows() != antennas_ || freq_grid.cols() != plan_->total)
    throw std::invalid_argument("TonewiseProjector: grid shape mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(antennas_, plan_->total);
  ComplexVector residual(chan_->users);
  for (std::size_t i = 0; i < plan_->used.size(); ++i) {
    const int col = plan_->used[i] - 1;
    const ComplexMatrix& h = chan_->tone_response[col];
    residual = h * freq_grid.col(col) - symbols_->col(col);
    out.col(col) =
        freq_grid.col(col) - h.adjoint() * gram_llt_[i].solve(residual);
  }
  return out;
}

ComplexMatrix TonewiseProjector::least_squares() const {
  return project(ComplexMatrix::Zero(antennas_, plan_->total));
}

double TonewiseProjector::evm_residual(const ComplexMatrix& freq_grid) const {
  double worst = 0.0;
  for (int w : plan_->used) {
    const ComplexMatrix& h = chan_->tone_response[w - 1];
    const double ref = symbols_->col(w - 1).norm();
    const double err = (h * freq_grid.col(w - 1) - symbols_->col(w - 1)).norm();
    worst = std::max(worst, ref > 0.0 ? err / ref : err);
  }
  return worst;
}

double TonewiseProjector::oob_energy(const ComplexMatrix& freq_grid) const {
  double energy = 0.0;
  auto it = plan_->used.begin();
  for (int w = 1; w <= plan_->total; ++w) {
    if (it != plan_->used.end() && *it == w)
      ++it;
    else
      energy += freq_grid.col(w - 1).squaredNorm();
  }
  return energy;
}

ComplexMatrix ls_precode(const ComplexMatrix& symbols,
                         const ChannelRealization& chan, const TonePlan& plan) {
  return TonewiseProjector(symbols, chan, plan).least_squares();
}

std::pair<ComplexMatrix, double> normalize_power(const ComplexMatrix& freq_grid) {
  const double power = freq_grid.squaredNorm();
  if (power == 0.0)
    throw std::domain_error("normalize_power: zero grid");
  return {freq_grid / std::sqrt(power), power};
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& os, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double read_f64(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void write_matrix_body(std::ostream& os, const ComplexMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      write_f64(os, m(r, c).real());
      write_f64(os, m(r, c).imag());
    }
}

void read_matrix_body(std::istream& is, ComplexMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = read_f64(is);
      const double im = read_f64(is);
      m(r, c) = {re, im};
    }
}

void check_magic(std::istream& is, const char* magic, const char* who) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw std::runtime_error(std::string(who) + ": bad container magic");
}

}  // namespace

void save_complex_matrix(const std::filesystem::path& path,
                         const ComplexMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("save_complex_matrix: cannot open " + path.string());
  os.write("PQM1", 4);
  write_u32(os, static_cast<std::uint32_t>(m.rows()));
  write_u32(os, static_cast<std::uint32_t>(m.cols()));
  write_matrix_body(os, m);
  if (!os)
    throw std::runtime_error("save_complex_matrix: write failed on " +
                             path.string());
}

ComplexMatrix load_complex_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("load_complex_matrix: cannot open " + path.string());
  check_magic(is, "PQM1", "load_complex_matrix");
  const auto rows = read_u32(is);
  const auto cols = read_u32(is);
  ComplexMatrix m(rows, cols);
  read_matrix_body(is, m);
  if (!is)
    throw std::runtime_error("load_complex_matrix: truncated file " +
                             path.string());
  return m;
}

void save_channel(const std::filesystem::path& path,
                  const ChannelRealization& chan) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("save_channel: cannot open " + path.string());
  os.write("PQC1", 4);
  write_u32(os, static_cast<std::uint32_t>(chan.users));
  write_u32(os, static_cast<std::uint32_t>(chan.antennas));
  write_u32(os, static_cast<std::uint32_t>(chan.total_tones));
  write_u32(os, static_cast<std::uint32_t>(chan.taps.size()));
  for (const auto& tap : chan.taps) write_matrix_body(os, tap);
  if (!os)
    throw std::runtime_error("save_channel: write failed on " + path.string());
}

ChannelRealization load_channel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("load_channel: cannot open " + path.string());
  check_magic(is, "PQC1", "load_channel");
  ChannelRealization chan;
  chan.users = static_cast<int>(read_u32(is));
  chan.antennas = static_cast<int>(read_u32(is));
  chan.total_tones = static_cast<int>(read_u32(is));
  const auto taps = read_u32(is);
  chan.taps.reserve(taps);
  for (std::uint32_t t = 0; t < taps; ++t) {
    ComplexMatrix tap(chan.users, chan.antennas);
    read_matrix_body(is, tap);
    chan.taps.push_back(std::move(tap));
  }
  if (!is)
    throw std::runtime_error("load_channel: truncated file " + path.string());
  chan.tone_response = tone_response_from_taps(chan.taps, chan.total_tones);
  return chan;
}

}  // namespace parqo
