#include "iwsim/nlos/dataset.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "iwsim/core/rng.hpp"

namespace iwsim::nlos {

namespace {

std::vector<double> exponential_pdp(int taps, double decay) {
  std::vector<double> p(static_cast<std::size_t>(taps));
  double total = 0.0;
  for (int l = 0; l < taps; ++l) {
    p[static_cast<std::size_t>(l)] = std::exp(-l / decay);
    total += p[static_cast<std::size_t>(l)];
  }
  for (double& x : p) x /= total;
  return p;
}

std::complex<double> cn01(Rng& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) {
    throw CirFormatError(std::string("CIR file truncated while reading ") + what);
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
  return v;
}

}  // namespace

void SyntheticCirParams::validate() const {
  if (n_per_class < 100) throw std::invalid_argument("n_per_class must be >= 100");
  if (tap_count < 8) throw std::invalid_argument("tap_count must be >= 8");
  if (!std::isfinite(los_k_db)) throw std::invalid_argument("los_k_db must be finite");
  if (!(los_delay_spread > 0.0)) throw std::invalid_argument("los_delay_spread must be > 0");
  if (!(nlos_spread_ratio > 0.0)) throw std::invalid_argument("nlos_spread_ratio must be > 0");
  if (std::isnan(estimation_snr_db)) throw std::invalid_argument("estimation_snr_db must be a number");
}

std::vector<Cir> generate_dataset(const SyntheticCirParams& params) {
  params.validate();
  const double k = std::pow(10.0, params.los_k_db / 10.0);
  const std::vector<double> los_pdp = exponential_pdp(params.tap_count, params.los_delay_spread);
  const std::vector<double> nlos_pdp =
      exponential_pdp(params.tap_count, params.los_delay_spread * params.nlos_spread_ratio);

  const std::size_t total = 2 * static_cast<std::size_t>(params.n_per_class);
  std::vector<Cir> out(total);
  for (std::size_t i = 0; i < total; ++i) {
    Rng rng(derive_seed(params.seed, i));
    Cir& c = out[i];
    c.label = i % 2 == 0 ? Label::LOS : Label::NLOS;
    const std::vector<double>& pdp = c.label == Label::LOS ? los_pdp : nlos_pdp;
    c.taps.resize(pdp.size());
    for (std::size_t l = 0; l < pdp.size(); ++l) c.taps[l] = std::sqrt(pdp[l]) * cn01(rng);
    if (c.label == Label::LOS) {
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      const std::complex<double> specular = std::polar(std::sqrt(k / (k + 1.0)), phase);
      c.taps[0] = std::sqrt(pdp[0]) * (specular + std::sqrt(1.0 / (k + 1.0)) * cn01(rng));
    }
    const double noise = std::sqrt(std::pow(10.0, -params.estimation_snr_db / 10.0));
    if (noise > 0.0) {
      for (auto& t : c.taps) t += noise * cn01(rng);
    }
  }
  return out;
}

double estimate_k_factor(const std::vector<std::complex<double>>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples for K-factor estimate");
  double m2 = 0.0, m4 = 0.0;
  for (const auto& h : samples) {
    const double p = std::norm(h);
    m2 += p;
    m4 += p * p;
  }
  m2 /= static_cast<double>(samples.size());
  m4 /= static_cast<double>(samples.size());
  // E|h|^4 = (2 - K^2/(1+K)^2) Omega^2 for a Rician envelope.
  const double root = std::sqrt(std::max(0.0, 2.0 * m2 * m2 - m4));
  return root / (m2 - root);
}

void write_cirs(std::ostream& out, const std::vector<Cir>& cirs) {
  const std::size_t taps = cirs.empty() ? 0 : cirs.front().taps.size();
  for (const Cir& c : cirs) {
    if (c.taps.size() != taps) throw std::invalid_argument("all CIRs in a file need the same tap count");
  }
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cirs.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(taps));
  for (const Cir& c : cirs) {
    for (const auto& t : c.taps) {
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(t.real()));
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(t.imag()));
    }
    out.put(static_cast<char>(c.label));
  }
  if (!out) throw std::runtime_error("failed writing CIR data");
}

std::vector<Cir> read_cirs(std::istream& in) {
  const auto count = get_le<std::uint32_t>(in, "header");
  const auto taps = get_le<std::uint32_t>(in, "header");
  std::vector<Cir> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Cir c;
    c.taps.resize(taps);
    for (auto& t : c.taps) {
      const double re = std::bit_cast<double>(get_le<std::uint64_t>(in, "taps"));
      const double im = std::bit_cast<double>(get_le<std::uint64_t>(in, "taps"));
      t = {re, im};
    }
    const auto label = get_le<std::uint8_t>(in, "label");
    if (label > 2) {
      throw CirFormatError("record " + std::to_string(i) + " has invalid label " + std::to_string(label));
    }
    c.label = static_cast<Label>(label);
    out.push_back(std::move(c));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CirFormatError("trailing bytes after CIR records");
  return out;
}

void write_cirs_file(const std::string& path, const std::vector<Cir>& cirs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_cirs(out, cirs);
}

std::vector<Cir> read_cirs_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_cirs(in);
}

}  // namespace iwsim::nlos
