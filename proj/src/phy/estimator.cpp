#include "iwsim/phy/estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace iwsim::phy {

CVector interpolate_bins(const std::vector<int>& bins, const std::vector<Complex>& values, int n) {
  if (bins.empty() || bins.size() != values.size()) {
    throw std::invalid_argument("interpolation needs at least one known bin");
  }
  CVector out(n);
  std::size_t j = 0;
  for (int f = 0; f < n; ++f) {
    if (f <= bins.front()) {
      out[f] = values.front();
    } else if (f >= bins.back()) {
      out[f] = values.back();
    } else {
      while (bins[j + 1] < f) ++j;
      const double t = static_cast<double>(f - bins[j]) / (bins[j + 1] - bins[j]);
      const Complex a = values[j];
      const Complex b = values[j + 1];
      out[f] = Complex(a.real() + t * (b.real() - a.real()), a.imag() + t * (b.imag() - a.imag()));
    }
  }
  return out;
}

CVector ls_channel_estimate(const CVector& rx_preamble, const CVector& tx_preamble,
                            const std::vector<int>& pilots) {
  const auto n = static_cast<int>(tx_preamble.size());
  if (rx_preamble.size() != n || n == 0) {
    throw std::invalid_argument("ls_channel_estimate: preamble length mismatch");
  }
  const CMatrix F = dft_matrix(n);
  const CVector RX = F * rx_preamble;
  const CVector TX = F * tx_preamble;

  std::vector<int> cand = pilots;
  if (cand.empty()) {
    cand.resize(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) cand[static_cast<std::size_t>(f)] = f;
  }
  std::sort(cand.begin(), cand.end());
  std::vector<int> bins;
  std::vector<Complex> values;
  for (int f : cand) {
    if (f < 0 || f >= n) throw std::invalid_argument("pilot bin out of range");
    if (std::abs(TX[f]) < kPilotFloor) continue;
    bins.push_back(f);
    values.push_back(RX[f] / TX[f]);
  }
  if (bins.empty()) throw std::invalid_argument("ls_channel_estimate: no usable pilot bin");
  return interpolate_bins(bins, values, n);
}

}  // namespace iwsim::phy
