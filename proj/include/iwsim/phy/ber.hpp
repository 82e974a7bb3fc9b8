#pragma once

#include <cstdint>

#include "iwsim/phy/channel.hpp"
#include "iwsim/phy/gfdm.hpp"

namespace iwsim::phy {

/// Genie switches for oracle comparisons. Off: the receiver synchronizes
/// and estimates the channel from the preamble.
struct BerOptions {
  bool genie_sync = false;     // true frame start and CFO
  bool genie_channel = false;  // true channel response instead of LS
};

struct BerResult {
  double ber = 0.0;
  std::uint64_t bits = 0;    // rounded up to whole frames
  std::uint64_t errors = 0;
  std::uint64_t frames = 0;
  std::uint64_t missed_frames = 0;  // every bit of a missed frame counts as an error
};

/// Monte-Carlo uncoded BER through map, modulate, frame, channel, sync,
/// estimate, demodulate, demap and hard decision. Each frame carries one
/// data block.
BerResult ber_run(const GfdmConfig& cfg, const ChannelModel& channel, std::uint64_t n_bits,
                  std::uint64_t seed, const BerOptions& options = {});

/// Per-sample SNR that yields `ebn0_db` for unit-energy symbols.
double snr_db_from_ebn0(double ebn0_db, Constellation c);

/// Gaussian tail probability.
double q_function(double x);

}  // namespace iwsim::phy
