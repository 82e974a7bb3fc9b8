#pragma once

#include <vector>

#include "iwsim/phy/gfdm.hpp"

namespace iwsim::phy {

/// Pilot bins with |TX| below this are dropped and interpolated.
inline constexpr double kPilotFloor = 1e-12;

/// Frequency-domain LS estimate over the preamble's DFT bins:
/// H = RX / TX on pilot bins, linear interpolation (real and imaginary parts
/// separately) in between, nearest pilot beyond the outermost ones.
/// `pilots` empty means every bin whose TX magnitude clears kPilotFloor.
CVector ls_channel_estimate(const CVector& rx_preamble, const CVector& tx_preamble,
                            const std::vector<int>& pilots = {});

/// Linear interpolation of `values` known at ascending `bins` onto 0..n-1.
CVector interpolate_bins(const std::vector<int>& bins, const std::vector<Complex>& values, int n);

}  // namespace iwsim::phy
