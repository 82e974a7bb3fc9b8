#pragma once

#include <cstdint>
#include <string>

#include "iwsim/phy/gfdm.hpp"

namespace iwsim::phy {

/// Preamble of P samples whose two halves are identical: pseudo-random QPSK
/// on the even DFT bins, scaled to unit mean sample power. P must be even.
CVector make_preamble(int P, std::uint64_t seed = 0x5052454dULL);

struct Frame {
  CVector samples;
  CVector preamble;  // without CP/CS
  int preamble_start = 0;  // index of the first preamble sample (after its CP)
  int payload_start = 0;   // index of the first payload sample (after its CP)
};

/// [CP|preamble|CS] ++ [CP|payload|CS], with the preamble length equal to
/// the payload length N. CP is the tail of the guarded block, CS its head.
Frame build_frame(const CVector& payload, const GfdmConfig& cfg);

inline int frame_length(const GfdmConfig& cfg) {
  return 2 * (cfg.cp_len + cfg.cs_len) + 2 * cfg.N();
}

/// Algorithmic latency in samples: the receiver needs the whole frame.
struct PhyLatency {
  int block_samples = 0;  // one guarded data block
  int frame_samples = 0;
  double block_us = 0.0;
  double frame_us = 0.0;
};

PhyLatency latency_report(const GfdmConfig& cfg, double sample_rate_hz);

/// Interleaved float64 I/Q, little-endian.
void write_iq(const std::string& path, const CVector& samples);
CVector read_iq(const std::string& path);

}  // namespace iwsim::phy
