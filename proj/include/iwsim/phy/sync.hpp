#pragma once

#include <stdexcept>
#include <vector>

#include "iwsim/phy/gfdm.hpp"

namespace iwsim::phy {

class NoFrameDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyncResult {
  int frame_start = 0;  // index of the first frame sample (start of the preamble CP)
  double cfo = 0.0;     // in DFT bin spacings of the N-point block
  double peak = 0.0;    // timing metric at the argmax
};

inline constexpr double kSyncThreshold = 0.5;

/// Schmidl-Cox timing metric M(d) = |P(d)|^2 / R(d)^2 over half-length
/// L = N/2, for every d with a full window inside `rx`. R(d) is the mean
/// energy of the two half-windows, which bounds M by 1.
std::vector<double> timing_metric(const CVector& rx, int L, std::vector<Complex>* P = nullptr);

struct SyncOptions {
  /// Refine the plateau estimate by cross-correlating with the known
  /// preamble (after CFO removal) within +-N/4 samples.
  bool fine_timing = true;
};

/// Coarse frame start from the midpoint of the metric plateau (90% points),
/// fractional CFO from the phase of P at the metric peak. Throws
/// NoFrameDetected when the metric never reaches kSyncThreshold.
SyncResult schmidl_cox_sync(const CVector& rx, const GfdmConfig& cfg, const SyncOptions& options = {});

/// Multiplies sample n by exp(-j 2 pi cfo n / N).
CVector correct_cfo(const CVector& rx, double cfo, int N);

}  // namespace iwsim::phy
