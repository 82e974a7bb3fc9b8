#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace iwsim::phy {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class PulseShape { RaisedCosine, RootRaisedCosine, Rect };
enum class Constellation { BPSK, QPSK, QAM16 };
enum class Receiver { MatchedFilter, ZeroForcing };

std::string_view to_string(PulseShape p);
std::string_view to_string(Constellation c);
std::string_view to_string(Receiver r);
PulseShape parse_pulse(std::string_view text);
Constellation parse_constellation(std::string_view text);
Receiver parse_receiver(std::string_view text);

/// Thrown when zero-forcing is requested for a singular modulation matrix.
class NonInvertibleConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GfdmConfig {
  int K = 16;  // subcarriers
  int M = 5;   // subsymbols
  std::vector<int> active;  // empty means every subcarrier
  PulseShape pulse = PulseShape::RaisedCosine;
  double rolloff = 0.5;
  int cp_len = 16;
  int cs_len = 0;
  Constellation constellation = Constellation::QPSK;
  Receiver receiver = Receiver::ZeroForcing;
  /// Raised-cosine taper over the outer samples of CP and CS; 0 disables.
  int window_len = 0;

  int N() const { return K * M; }
  std::vector<int> active_set() const;
  /// Throws std::invalid_argument on out-of-range or duplicate values.
  void validate() const;
};

int bits_per_symbol(Constellation c);
/// Gray mapping to unit average power. `bits.size()` must be a multiple of
/// bits_per_symbol.
std::vector<Complex> map_bits(const std::vector<std::uint8_t>& bits, Constellation c);
/// Hard decisions, inverse of map_bits.
std::vector<std::uint8_t> decide_bits(const std::vector<Complex>& symbols, Constellation c);

/// K x M symbol grid, d(k, m).
struct ResourceGrid {
  CMatrix d;

  int K() const { return static_cast<int>(d.rows()); }
  int M() const { return static_cast<int>(d.cols()); }
  static ResourceGrid zeros(const GfdmConfig& cfg) {
    return ResourceGrid{CMatrix::Zero(cfg.K, cfg.M)};
  }
};

/// Fills subsymbol by subsymbol, active subcarriers ascending within each.
ResourceGrid map_resources(const std::vector<Complex>& symbols, const GfdmConfig& cfg);
std::vector<Complex> demap_resources(const ResourceGrid& grid, const GfdmConfig& cfg);

/// Real prototype filter of N samples with unit energy. RC and RRC are
/// defined on the N-bin circular spectrum; Rect spans the first K samples.
Eigen::VectorXd prototype_filter(const GfdmConfig& cfg);

/// Column k + K*m holds g[(n - mK) mod N] * exp(j 2 pi k n / K).
CMatrix modulation_matrix(const GfdmConfig& cfg);

/// Unitary N-point DFT matrix.
CMatrix dft_matrix(int n);

/// Transmitter and receiver sharing one precomputed modulation matrix.
class GfdmModem {
 public:
  explicit GfdmModem(GfdmConfig cfg);

  const GfdmConfig& config() const { return cfg_; }
  const CMatrix& matrix() const { return A_; }

  CVector modulate(const ResourceGrid& grid) const;
  /// Equalizes per DFT bin by 1/H (H empty: ideal channel), then applies the
  /// configured receiver matrix. Throws NonInvertibleConfig for ZF on a
  /// singular matrix.
  ResourceGrid demodulate(const CVector& block, const CVector& H = {}) const;

 private:
  GfdmConfig cfg_;
  CMatrix A_;
  CMatrix F_;
  CMatrix B_;  // empty when ZF was requested and A is singular
};

CVector gfdm_modulate(const ResourceGrid& grid, const GfdmConfig& cfg);
ResourceGrid gfdm_demodulate(const CVector& samples, const GfdmConfig& cfg, const CVector& H = {});

}  // namespace iwsim::phy
