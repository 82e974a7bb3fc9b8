#include "iwsim/phy/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iwsim::phy {

double ChannelModel::noise_variance() const {
  if (kind == ChannelKind::Ideal || std::isinf(snr_db)) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

std::vector<Complex> ChannelModel::effective_taps() const {
  if (kind != ChannelKind::Multipath) return {Complex{1.0, 0.0}};
  if (taps.empty()) throw std::invalid_argument("multipath channel needs at least one tap");
  if (!normalize_taps) return taps;
  double energy = 0.0;
  for (const Complex& t : taps) energy += std::norm(t);
  if (energy <= 0.0) throw std::invalid_argument("multipath taps have zero energy");
  std::vector<Complex> out = taps;
  for (Complex& t : out) t /= std::sqrt(energy);
  return out;
}

ChannelModel ChannelModel::awgn(double snr_db) {
  ChannelModel c;
  c.kind = ChannelKind::AWGN;
  c.snr_db = snr_db;
  return c;
}

ChannelModel ChannelModel::multipath(std::vector<Complex> taps, double snr_db) {
  ChannelModel c;
  c.kind = ChannelKind::Multipath;
  c.taps = std::move(taps);
  c.snr_db = snr_db;
  return c;
}

CVector apply_channel(const CVector& tx, const ChannelModel& ch, int N, Rng& rng) {
  if (ch.delay < 0 || ch.tail < 0) throw std::invalid_argument("channel delay and tail must be >= 0");
  const std::vector<Complex> h = ch.effective_taps();
  const auto n_tx = static_cast<long>(tx.size());
  const auto n_h = static_cast<long>(h.size());
  const long len = ch.delay + n_tx + n_h - 1 + ch.tail;
  CVector out = CVector::Zero(len);
  for (long i = 0; i < n_tx; ++i) {
    for (long j = 0; j < n_h; ++j) out[ch.delay + i + j] += tx[i] * h[static_cast<std::size_t>(j)];
  }
  if (ch.cfo != 0.0) {
    for (long n = 0; n < len; ++n) {
      out[n] *= std::polar(1.0, 2.0 * std::numbers::pi * ch.cfo * static_cast<double>(n) / N);
    }
  }
  const double var = ch.noise_variance();
  if (var > 0.0) {
    const double sd = std::sqrt(var / 2.0);
    for (long n = 0; n < len; ++n) {
      const double re = rng.normal();
      const double im = rng.normal();
      out[n] += Complex(sd * re, sd * im);
    }
  }
  return out;
}

CVector channel_response(const ChannelModel& ch, int N) {
  const std::vector<Complex> h = ch.effective_taps();
  if (static_cast<long>(h.size()) > N) throw std::invalid_argument("more taps than DFT bins");
  CVector H(N);
  for (int f = 0; f < N; ++f) {
    Complex acc{};
    for (std::size_t j = 0; j < h.size(); ++j) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(f) * static_cast<long>(j)) % N) / N;
      acc += h[j] * std::polar(1.0, phase);
    }
    H[f] = acc;
  }
  return H;
}

}  // namespace iwsim::phy
