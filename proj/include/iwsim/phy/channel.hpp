#pragma once

#include <limits>
#include <vector>

#include "iwsim/core/rng.hpp"
#include "iwsim/phy/gfdm.hpp"

namespace iwsim::phy {

enum class ChannelKind { Ideal, AWGN, Multipath };

/// Noise power is referred to unit mean sample power: snr_db = 10 gives a
/// complex noise variance of 0.1 regardless of the signal.
struct ChannelModel {
  ChannelKind kind = ChannelKind::Ideal;
  double snr_db = std::numeric_limits<double>::infinity();
  std::vector<Complex> taps{Complex{1.0, 0.0}};  // Multipath only
  bool normalize_taps = true;
  double cfo = 0.0;  // DFT bin spacings of the N-point block
  int delay = 0;     // leading samples before the signal
  int tail = 0;      // trailing samples after the channel output

  double noise_variance() const;
  /// Taps actually applied (unit energy when normalize_taps is set).
  std::vector<Complex> effective_taps() const;

  static ChannelModel ideal() { return {}; }
  static ChannelModel awgn(double snr_db);
  static ChannelModel multipath(std::vector<Complex> taps, double snr_db);
};

/// Delay, FIR, CFO, then noise on every output sample (including the leading
/// and trailing ones). Output length = delay + |tx| + |taps| - 1 + tail.
CVector apply_channel(const CVector& tx, const ChannelModel& ch, int N, Rng& rng);

/// N-bin frequency response: DFT of the zero-padded effective taps.
CVector channel_response(const ChannelModel& ch, int N);

}  // namespace iwsim::phy
