#include "iwsim/nlos/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace iwsim::nlos {

std::string to_string(Label label) {
  switch (label) {
    case Label::LOS: return "LOS";
    case Label::NLOS: return "NLOS";
    case Label::Unknown: break;
  }
  return "Unknown";
}

std::string to_string(Feature f) {
  switch (f) {
    case Feature::Mu: return "mu";
    case Feature::Sigma: return "sigma";
    case Feature::Skewness: return "s";
    case Feature::Kurtosis: break;
  }
  return "kappa";
}

void Cir::validate() const {
  if (taps.size() < 8) {
    throw std::invalid_argument("CIR needs at least 8 taps, got " + std::to_string(taps.size()));
  }
  bool nonzero = false;
  for (const auto& t : taps) {
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
      throw std::invalid_argument("CIR tap is not finite");
    }
    nonzero = nonzero || t != std::complex<double>{};
  }
  if (!nonzero) throw std::invalid_argument("CIR has no nonzero tap");
}

double FeatureVector::operator[](Feature f) const { return values()[static_cast<std::size_t>(f)]; }

FeatureVector moment_features(std::span<const double> a) {
  if (a.size() < 2) {
    throw std::invalid_argument("moment features need at least 2 taps, got " + std::to_string(a.size()));
  }
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (double x : a) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : a) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  FeatureVector f;
  f.mu = mean;
  f.sigma = std::sqrt(m2);
  // Spread at rounding level of the mean counts as constant.
  if (f.sigma <= 1e-12 * std::abs(mean) || f.sigma == 0.0) {
    f.sigma = 0.0;
    f.degenerate = true;
    return f;
  }
  f.s = m3 / (m2 * f.sigma);
  f.kappa = m4 / (m2 * m2);
  return f;
}

FeatureVector extract_features(std::span<const std::complex<double>> taps) {
  std::vector<double> amp(taps.size());
  std::transform(taps.begin(), taps.end(), amp.begin(), [](const auto& t) { return std::abs(t); });
  return moment_features(amp);
}

const std::vector<Feature>& subset_features(FeatureSubset subset) {
  static const std::vector<Feature> s1 = {Feature::Sigma};
  static const std::vector<Feature> s2 = {Feature::Skewness, Feature::Kurtosis};
  static const std::vector<Feature> s3 = {Feature::Sigma, Feature::Skewness, Feature::Kurtosis};
  static const std::vector<Feature> s4 = {Feature::Mu, Feature::Sigma, Feature::Skewness,
                                          Feature::Kurtosis};
  switch (subset) {
    case FeatureSubset::S1: return s1;
    case FeatureSubset::S2: return s2;
    case FeatureSubset::S3: return s3;
    case FeatureSubset::S4: break;
  }
  return s4;
}

std::string to_string(FeatureSubset subset) {
  return "S" + std::to_string(static_cast<int>(subset) + 1);
}

FeatureSubset parse_subset(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (t == "s1") return FeatureSubset::S1;
  if (t == "s2") return FeatureSubset::S2;
  if (t == "s3") return FeatureSubset::S3;
  if (t == "s4") return FeatureSubset::S4;
  throw std::invalid_argument("unknown feature subset '" + text + "' (expected s1, s2, s3 or s4)");
}

std::vector<FeatureSubset> parse_subsets(const std::string& text) {
  std::vector<FeatureSubset> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_subset(item));
  if (out.empty()) throw std::invalid_argument("empty feature subset list");
  return out;
}

FeatureMap to_map(const FeatureVector& f) {
  return {{Feature::Mu, f.mu}, {Feature::Sigma, f.sigma}, {Feature::Skewness, f.s},
          {Feature::Kurtosis, f.kappa}};
}

}  // namespace iwsim::nlos
