#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "iwsim/nlos/features.hpp"

namespace iwsim::nlos {

/// Synthetic indoor CIRs. Both classes use an exponential power-delay
/// profile normalized to unit total power. LOS taps are Rayleigh except tap 0,
/// which is Rician with factor `los_k_db`; NLOS taps are all Rayleigh with a
/// decay constant `nlos_spread_ratio` times longer. Every tap then gets
/// complex Gaussian estimation noise at `estimation_snr_db` below the total
/// CIR power.
struct SyntheticCirParams {
  int n_per_class = 1000;
  int tap_count = 16;
  double los_k_db = 6.0;
  double los_delay_spread = 1.5;  // PDP decay constant in taps
  double nlos_spread_ratio = 3.0;
  double estimation_snr_db = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Records alternate LOS, NLOS. Record i draws from its own stream
/// derive_seed(seed, i).
std::vector<Cir> generate_dataset(const SyntheticCirParams& params);

/// Moment estimator of the Rician K factor (linear) from E|h|^2 and E|h|^4.
double estimate_k_factor(const std::vector<std::complex<double>>& samples);

class CirFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary layout, little-endian: u32 count, u32 tap_count, then per record
/// tap_count interleaved float64 I/Q pairs followed by a u8 label.
void write_cirs(std::ostream& out, const std::vector<Cir>& cirs);
std::vector<Cir> read_cirs(std::istream& in);
void write_cirs_file(const std::string& path, const std::vector<Cir>& cirs);
std::vector<Cir> read_cirs_file(const std::string& path);

}  // namespace iwsim::nlos
