#include "iwsim/phy/gfdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace iwsim::phy {

namespace {
constexpr double kPi = std::numbers::pi;

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }
}  // namespace

std::string_view to_string(PulseShape p) {
  switch (p) {
    case PulseShape::RaisedCosine: return "rc";
    case PulseShape::RootRaisedCosine: return "rrc";
    case PulseShape::Rect: return "rect";
  }
  return "?";
}

std::string_view to_string(Constellation c) {
  switch (c) {
    case Constellation::BPSK: return "bpsk";
    case Constellation::QPSK: return "qpsk";
    case Constellation::QAM16: return "16qam";
  }
  return "?";
}

std::string_view to_string(Receiver r) {
  return r == Receiver::MatchedFilter ? "mf" : "zf";
}

PulseShape parse_pulse(std::string_view text) {
  if (text == "rc") return PulseShape::RaisedCosine;
  if (text == "rrc") return PulseShape::RootRaisedCosine;
  if (text == "rect" || text == "dirichlet") return PulseShape::Rect;
  bad("unknown pulse '" + std::string(text) + "' (expected rc, rrc or rect)");
}

Constellation parse_constellation(std::string_view text) {
  if (text == "bpsk") return Constellation::BPSK;
  if (text == "qpsk") return Constellation::QPSK;
  if (text == "16qam" || text == "qam16") return Constellation::QAM16;
  bad("unknown constellation '" + std::string(text) + "' (expected bpsk, qpsk or 16qam)");
}

Receiver parse_receiver(std::string_view text) {
  if (text == "mf") return Receiver::MatchedFilter;
  if (text == "zf") return Receiver::ZeroForcing;
  bad("unknown receiver '" + std::string(text) + "' (expected mf or zf)");
}

std::vector<int> GfdmConfig::active_set() const {
  if (!active.empty()) {
    std::vector<int> s = active;
    std::sort(s.begin(), s.end());
    return s;
  }
  std::vector<int> all(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) all[static_cast<std::size_t>(k)] = k;
  return all;
}

void GfdmConfig::validate() const {
  if (K < 1 || M < 1) bad("K and M must be at least 1");
  if (N() > 4096) bad("block length K*M must not exceed 4096");
  std::vector<int> s = active_set();
  if (s.empty()) bad("active subcarrier set is empty");
  for (int k : s) {
    if (k < 0 || k >= K) bad("active subcarrier " + std::to_string(k) + " outside [0, K)");
  }
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) bad("duplicate active subcarrier");
  if (pulse != PulseShape::Rect && (rolloff < 0.0 || rolloff > 1.0)) bad("rolloff must lie in [0, 1]");
  if (cp_len < 0 || cs_len < 0) bad("cp_len and cs_len must be non-negative");
  if (cp_len > N() || cs_len > N()) bad("cp_len and cs_len must not exceed N");
  if (window_len < 0 || window_len > cp_len || window_len > cs_len) {
    bad("window_len must lie in [0, min(cp_len, cs_len)]");
  }
}

int bits_per_symbol(Constellation c) {
  switch (c) {
    case Constellation::BPSK: return 1;
    case Constellation::QPSK: return 2;
    case Constellation::QAM16: return 4;
  }
  return 0;
}

namespace {
// Gray-coded 4-PAM level for two bits, unnormalized.
double pam4(std::uint8_t b0, std::uint8_t b1) {
  if (b0 == 0) return b1 == 0 ? -3.0 : -1.0;
  return b1 == 1 ? 1.0 : 3.0;
}

void pam4_decide(double x, std::uint8_t& b0, std::uint8_t& b1) {
  b0 = x > 0.0 ? 1 : 0;
  b1 = std::abs(x) < 2.0 ? 1 : 0;
}
}  // namespace

std::vector<Complex> map_bits(const std::vector<std::uint8_t>& bits, Constellation c) {
  const auto b = static_cast<std::size_t>(bits_per_symbol(c));
  if (bits.size() % b != 0) bad("bit count is not a multiple of the bits per symbol");
  std::vector<Complex> out(bits.size() / b);
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s10 = 1.0 / std::sqrt(10.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t* p = bits.data() + i * b;
    switch (c) {
      case Constellation::BPSK: out[i] = p[0] ? -1.0 : 1.0; break;
      case Constellation::QPSK: out[i] = Complex(p[0] ? -s2 : s2, p[1] ? -s2 : s2); break;
      case Constellation::QAM16: out[i] = Complex(pam4(p[0], p[1]), pam4(p[2], p[3])) * s10; break;
    }
  }
  return out;
}

std::vector<std::uint8_t> decide_bits(const std::vector<Complex>& symbols, Constellation c) {
  const auto b = static_cast<std::size_t>(bits_per_symbol(c));
  std::vector<std::uint8_t> out(symbols.size() * b);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    std::uint8_t* p = out.data() + i * b;
    const Complex z = symbols[i];
    switch (c) {
      case Constellation::BPSK: p[0] = z.real() < 0.0; break;
      case Constellation::QPSK:
        p[0] = z.real() < 0.0;
        p[1] = z.imag() < 0.0;
        break;
      case Constellation::QAM16: {
        const Complex u = z * std::sqrt(10.0);
        pam4_decide(u.real(), p[0], p[1]);
        pam4_decide(u.imag(), p[2], p[3]);
        break;
      }
    }
  }
  return out;
}

ResourceGrid map_resources(const std::vector<Complex>& symbols, const GfdmConfig& cfg) {
  const std::vector<int> act = cfg.active_set();
  const std::size_t need = act.size() * static_cast<std::size_t>(cfg.M);
  if (symbols.size() != need) {
    bad("map_resources: got " + std::to_string(symbols.size()) + " symbols, need " +
        std::to_string(need));
  }
  ResourceGrid g = ResourceGrid::zeros(cfg);
  std::size_t i = 0;
  for (int m = 0; m < cfg.M; ++m) {
    for (int k : act) g.d(k, m) = symbols[i++];
  }
  return g;
}

std::vector<Complex> demap_resources(const ResourceGrid& grid, const GfdmConfig& cfg) {
  if (grid.K() != cfg.K || grid.M() != cfg.M) bad("demap_resources: grid size mismatch");
  const std::vector<int> act = cfg.active_set();
  std::vector<Complex> out;
  out.reserve(act.size() * static_cast<std::size_t>(cfg.M));
  for (int m = 0; m < cfg.M; ++m) {
    for (int k : act) out.push_back(grid.d(k, m));
  }
  return out;
}

Eigen::VectorXd prototype_filter(const GfdmConfig& cfg) {
  const int N = cfg.N();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
  if (cfg.pulse == PulseShape::Rect) {
    g.head(cfg.K).setConstant(1.0 / std::sqrt(static_cast<double>(cfg.K)));
    return g;
  }
  // Spectrum in units of the subcarrier spacing (M bins).
  const double a = cfg.rolloff;
  Eigen::VectorXd G(N);
  for (int f = 0; f < N; ++f) {
    const double nu = static_cast<double>(std::min(f, N - f)) / cfg.M;
    double v;
    if (nu <= (1.0 - a) / 2.0) {
      v = 1.0;
    } else if (nu <= (1.0 + a) / 2.0) {
      v = 0.5 * (1.0 + std::cos(kPi / a * (nu - (1.0 - a) / 2.0)));
    } else {
      v = 0.0;
    }
    G[f] = cfg.pulse == PulseShape::RootRaisedCosine ? std::sqrt(v) : v;
  }
  // G is real and even, so its inverse DFT is a real cosine sum.
  for (int n = 0; n < N; ++n) {
    double acc = 0.0;
    for (int f = 0; f < N; ++f) {
      acc += G[f] * std::cos(2.0 * kPi * static_cast<double>(static_cast<long>(f) * n % N) / N);
    }
    g[n] = acc;
  }
  return g / g.norm();
}

CMatrix modulation_matrix(const GfdmConfig& cfg) {
  cfg.validate();
  const int K = cfg.K;
  const int M = cfg.M;
  const int N = cfg.N();
  const Eigen::VectorXd g = prototype_filter(cfg);
  CMatrix A(N, N);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const int col = k + K * m;
      for (int n = 0; n < N; ++n) {
        const double phase = 2.0 * kPi * static_cast<double>((static_cast<long>(k) * n) % K) / K;
        A(n, col) = g[((n - m * K) % N + N) % N] * std::polar(1.0, phase);
      }
    }
  }
  return A;
}

CMatrix dft_matrix(int n) {
  CMatrix F(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double phase = -2.0 * kPi * static_cast<double>((static_cast<long>(r) * c) % n) / n;
      F(r, c) = std::polar(scale, phase);
    }
  }
  return F;
}

GfdmModem::GfdmModem(GfdmConfig cfg) : cfg_(std::move(cfg)) {
  A_ = modulation_matrix(cfg_);
  F_ = dft_matrix(cfg_.N());
  if (cfg_.receiver == Receiver::MatchedFilter) {
    B_ = A_.adjoint();
    return;
  }
  Eigen::FullPivLU<CMatrix> lu(A_);
  lu.setThreshold(1e-10);
  if (lu.isInvertible()) B_ = lu.inverse();
}

CVector GfdmModem::modulate(const ResourceGrid& grid) const {
  if (grid.K() != cfg_.K || grid.M() != cfg_.M) bad("modulate: grid size mismatch");
  const CVector d = grid.d.reshaped();
  return A_ * d;
}

ResourceGrid GfdmModem::demodulate(const CVector& block, const CVector& H) const {
  const int N = cfg_.N();
  if (block.size() != N) bad("demodulate: expected " + std::to_string(N) + " samples");
  if (B_.size() == 0) {
    throw NonInvertibleConfig("non-invertible configuration: ZF requested but the modulation matrix (K=" +
                              std::to_string(cfg_.K) + ", M=" + std::to_string(cfg_.M) +
                              ", pulse " + std::string(to_string(cfg_.pulse)) + ") is singular");
  }
  CVector y = block;
  if (H.size() != 0) {
    if (H.size() != N) bad("demodulate: channel estimate must have N bins");
    const CVector Y = F_ * y;
    y = F_.adjoint() * Y.cwiseQuotient(H);
  }
  const CVector d = B_ * y;
  ResourceGrid out{d.reshaped(cfg_.K, cfg_.M)};
  return out;
}

CVector gfdm_modulate(const ResourceGrid& grid, const GfdmConfig& cfg) {
  return GfdmModem(cfg).modulate(grid);
}

ResourceGrid gfdm_demodulate(const CVector& samples, const GfdmConfig& cfg, const CVector& H) {
  return GfdmModem(cfg).demodulate(samples, H);
}

}  // namespace iwsim::phy
