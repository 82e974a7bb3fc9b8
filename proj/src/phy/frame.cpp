#include "iwsim/phy/frame.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "iwsim/core/rng.hpp"

namespace iwsim::phy {

CVector make_preamble(int P, std::uint64_t seed) {
  if (P < 2 || P % 2 != 0) {
    throw std::invalid_argument("preamble length must be even and at least 2 (got " +
                                std::to_string(P) + ")");
  }
  Rng rng(seed);
  CVector spec = CVector::Zero(P);
  const double s2 = 1.0 / std::sqrt(2.0);
  for (int f = 0; f < P; f += 2) {
    const auto q = rng.uniform_int(3);
    spec[f] = Complex((q & 1U) ? -s2 : s2, (q & 2U) ? -s2 : s2);
  }
  CVector x = dft_matrix(P).adjoint() * spec;
  const double power = x.squaredNorm() / P;
  return x / std::sqrt(power);
}

namespace {

// Appends [CP|block|CS], tapering the outer `w` samples when w > 0.
void append_guarded(CVector& out, int& pos, const CVector& block, const GfdmConfig& cfg) {
  const int n = static_cast<int>(block.size());
  const int start = pos;
  for (int i = 0; i < cfg.cp_len; ++i) out[pos++] = block[n - cfg.cp_len + i];
  for (int i = 0; i < n; ++i) out[pos++] = block[i];
  for (int i = 0; i < cfg.cs_len; ++i) out[pos++] = block[i];
  const int w = cfg.window_len;
  for (int i = 0; i < w; ++i) {
    const double ramp = 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / w));
    out[start + i] *= ramp;
    out[pos - 1 - i] *= ramp;
  }
}

}  // namespace

Frame build_frame(const CVector& payload, const GfdmConfig& cfg) {
  cfg.validate();
  const int N = cfg.N();
  if (payload.size() != N) {
    throw std::invalid_argument("build_frame: payload must have N = " + std::to_string(N) +
                                " samples");
  }
  Frame f;
  f.preamble = make_preamble(N);
  f.samples.resize(frame_length(cfg));
  int pos = 0;
  f.preamble_start = cfg.cp_len;
  append_guarded(f.samples, pos, f.preamble, cfg);
  f.payload_start = pos + cfg.cp_len;
  append_guarded(f.samples, pos, payload, cfg);
  return f;
}

PhyLatency latency_report(const GfdmConfig& cfg, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
  PhyLatency r;
  r.block_samples = cfg.cp_len + cfg.N() + cfg.cs_len;
  r.frame_samples = frame_length(cfg);
  r.block_us = r.block_samples / sample_rate_hz * 1e6;
  r.frame_us = r.frame_samples / sample_rate_hz * 1e6;
  return r;
}

namespace {
std::uint64_t to_le(std::uint64_t v) {
  return std::endian::native == std::endian::little ? v : __builtin_bswap64(v);
}
}  // namespace

void write_iq(const std::string& path, const CVector& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const Complex& z : samples) {
    for (double v : {z.real(), z.imag()}) {
      const std::uint64_t w = to_le(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&w), sizeof w);
    }
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

CVector read_iq(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes % 16 != 0) throw std::runtime_error("'" + path + "' is not a whole number of I/Q pairs");
  in.seekg(0);
  CVector out(static_cast<Eigen::Index>(bytes / 16));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    std::uint64_t w[2];
    in.read(reinterpret_cast<char*>(w), sizeof w);
    out[i] = Complex(std::bit_cast<double>(to_le(w[0])), std::bit_cast<double>(to_le(w[1])));
  }
  return out;
}

}  // namespace iwsim::phy
