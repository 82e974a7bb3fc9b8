#include "iwsim/phy/sync.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "iwsim/phy/frame.hpp"

namespace iwsim::phy {

std::vector<double> timing_metric(const CVector& rx, int L, std::vector<Complex>* P) {
  const auto len = static_cast<long>(rx.size());
  const long count = len - 2L * L + 1;
  std::vector<double> M(static_cast<std::size_t>(std::max(0L, count)), 0.0);
  if (P != nullptr) P->assign(M.size(), Complex{});
  if (count <= 0) return M;

  for (long d = 0; d < count; ++d) {
    Complex p{};
    double r = 0.0;
    for (long i = 0; i < L; ++i) {
      p += std::conj(rx[d + i]) * rx[d + i + L];
      r += std::norm(rx[d + i]) + std::norm(rx[d + i + L]);
    }
    const auto k = static_cast<std::size_t>(d);
    const double half = 0.5 * r;
    M[k] = half > 1e-300 ? std::norm(p) / (half * half) : 0.0;
    if (P != nullptr) (*P)[k] = p;
  }
  return M;
}

SyncResult schmidl_cox_sync(const CVector& rx, const GfdmConfig& cfg, const SyncOptions& options) {
  const int N = cfg.N();
  if (N % 2 != 0) throw std::invalid_argument("Schmidl-Cox needs an even block length");
  const int L = N / 2;
  std::vector<Complex> P;
  const std::vector<double> M = timing_metric(rx, L, &P);
  if (M.empty()) throw NoFrameDetected("no frame detected: input shorter than one preamble");
  const auto peak_it = std::max_element(M.begin(), M.end());
  const double peak = *peak_it;
  if (!(peak >= kSyncThreshold)) {
    throw NoFrameDetected("no frame detected: timing metric peak " + std::to_string(peak) +
                          " below " + std::to_string(kSyncThreshold));
  }
  const long arg = peak_it - M.begin();

  // Plateau: the run around the peak above 90% of it. The guarded preamble
  // repeats with period L over cp + 2L + cs samples, so the ideal plateau
  // spans [start, start + cp + cs].
  const double floor_level = 0.9 * peak;
  long left = arg;
  long right = arg;
  while (left > 0 && M[static_cast<std::size_t>(left - 1)] >= floor_level) --left;
  while (right + 1 < static_cast<long>(M.size()) && M[static_cast<std::size_t>(right + 1)] >= floor_level) {
    ++right;
  }
  const long twice = left + right - (cfg.cp_len + cfg.cs_len);
  long start = twice >= 0 ? (twice + 1) / 2 : -((-twice) / 2);

  SyncResult out;
  out.cfo = std::arg(P[static_cast<std::size_t>(arg)]) / std::numbers::pi;
  out.peak = peak;

  if (options.fine_timing) {
    // Cross-correlation with the known preamble after CFO removal, within
    // half a preamble half of the coarse estimate.
    const CVector ref = make_preamble(N).conjugate();
    const CVector y = correct_cfo(rx, out.cfo, N);
    double best = -1.0;
    long best_d = start;
    for (long d = start - L / 2; d <= start + L / 2; ++d) {
      const long s0 = d + cfg.cp_len;
      if (s0 < 0 || s0 + N > y.size()) continue;
      const double v = std::abs(ref.cwiseProduct(y.segment(s0, N)).sum());
      if (v > best) {
        best = v;
        best_d = d;
      }
    }
    start = best_d;
  }
  out.frame_start = static_cast<int>(start);
  return out;
}

CVector correct_cfo(const CVector& rx, double cfo, int N) {
  CVector out(rx.size());
  for (Eigen::Index n = 0; n < rx.size(); ++n) {
    const double phase = -2.0 * std::numbers::pi * cfo * static_cast<double>(n) / N;
    out[n] = rx[n] * std::polar(1.0, phase);
  }
  return out;
}

}  // namespace iwsim::phy
