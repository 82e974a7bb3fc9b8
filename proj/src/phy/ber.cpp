#include "iwsim/phy/ber.hpp"

#include <cmath>
#include <stdexcept>

#include "iwsim/phy/estimator.hpp"
#include "iwsim/phy/frame.hpp"
#include "iwsim/phy/sync.hpp"

namespace iwsim::phy {

double snr_db_from_ebn0(double ebn0_db, Constellation c) {
  return ebn0_db + 10.0 * std::log10(static_cast<double>(bits_per_symbol(c)));
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

BerResult ber_run(const GfdmConfig& cfg, const ChannelModel& channel, std::uint64_t n_bits,
                  std::uint64_t seed, const BerOptions& options) {
  cfg.validate();
  const GfdmModem modem(cfg);
  const int N = cfg.N();
  const std::size_t per_frame = cfg.active_set().size() * static_cast<std::size_t>(cfg.M) *
                                static_cast<std::size_t>(bits_per_symbol(cfg.constellation));
  const std::uint64_t frames = (n_bits + per_frame - 1) / per_frame;
  const CVector H_true = channel_response(channel, N);
  // Noise-only guard of one block on each side of every frame.
  ChannelModel ch = channel;
  ch.delay += N;
  ch.tail += N;

  Rng bits_rng(derive_seed(seed, 1));
  Rng chan_rng(derive_seed(seed, 2));
  BerResult res;
  std::vector<std::uint8_t> bits(per_frame);
  for (std::uint64_t f = 0; f < frames; ++f) {
    for (auto& b : bits) b = static_cast<std::uint8_t>(bits_rng.uniform_int(1));
    const ResourceGrid grid = map_resources(map_bits(bits, cfg.constellation), cfg);
    const Frame frame = build_frame(modem.modulate(grid), cfg);
    const CVector rx = apply_channel(frame.samples, ch, N, chan_rng);
    ++res.frames;

    int start = ch.delay;
    double cfo = ch.cfo;
    if (!options.genie_sync) {
      try {
        const SyncResult s = schmidl_cox_sync(rx, cfg);
        start = s.frame_start;
        cfo = s.cfo;
      } catch (const NoFrameDetected&) {
        ++res.missed_frames;
        res.errors += per_frame;
        continue;
      }
    }
    const CVector y = correct_cfo(rx, cfo, N);
    const long pre = static_cast<long>(start) + frame.preamble_start;
    const long pay = static_cast<long>(start) + frame.payload_start;
    if (pre < 0 || pay + N > y.size()) {
      ++res.missed_frames;
      res.errors += per_frame;
      continue;
    }
    CVector H = H_true;
    if (!options.genie_channel) H = ls_channel_estimate(y.segment(pre, N), frame.preamble);
    const ResourceGrid est = modem.demodulate(y.segment(pay, N), H);
    const std::vector<std::uint8_t> got = decide_bits(demap_resources(est, cfg), cfg.constellation);
    for (std::size_t i = 0; i < per_frame; ++i) res.errors += got[i] != bits[i];
  }
  res.bits = frames * per_frame;
  res.ber = res.bits > 0 ? static_cast<double>(res.errors) / static_cast<double>(res.bits) : 0.0;
  return res;
}

}  // namespace iwsim::phy
