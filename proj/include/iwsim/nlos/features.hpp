#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iwsim::nlos {

enum class Label : std::uint8_t { LOS = 0, NLOS = 1, Unknown = 2 };

std::string to_string(Label label);

struct Cir {
  std::vector<std::complex<double>> taps;
  Label label = Label::Unknown;

  /// At least 8 taps, all finite, not all zero.
  void validate() const;
};

enum class Feature { Mu = 0, Sigma = 1, Skewness = 2, Kurtosis = 3 };
inline constexpr std::size_t kFeatureCount = 4;

std::string to_string(Feature f);

/// Population moments of the tap amplitudes. `kappa` is the raw (not excess)
/// kurtosis. A constant amplitude sample has sigma = 0 and then s = kappa = 0
/// with `degenerate` set.
struct FeatureVector {
  double mu = 0.0;
  double sigma = 0.0;
  double s = 0.0;
  double kappa = 0.0;
  bool degenerate = false;

  double operator[](Feature f) const;
  std::array<double, kFeatureCount> values() const { return {mu, sigma, s, kappa}; }
};

/// Throws std::invalid_argument below 2 amplitudes.
FeatureVector moment_features(std::span<const double> amplitudes);
FeatureVector extract_features(std::span<const std::complex<double>> taps);

enum class FeatureSubset { S1, S2, S3, S4 };

/// S1 = {sigma}, S2 = {s, kappa}, S3 = {sigma, s, kappa}, S4 = all four.
const std::vector<Feature>& subset_features(FeatureSubset subset);
std::string to_string(FeatureSubset subset);
/// "s1".."s4", case-insensitive.
FeatureSubset parse_subset(const std::string& text);
/// Comma separated list of subsets.
std::vector<FeatureSubset> parse_subsets(const std::string& text);

inline constexpr std::array<FeatureSubset, 4> kAllSubsets = {FeatureSubset::S1, FeatureSubset::S2,
                                                              FeatureSubset::S3, FeatureSubset::S4};

/// Partially specified features, as handed to classify() from outside.
using FeatureMap = std::map<Feature, double>;
FeatureMap to_map(const FeatureVector& f);

}  // namespace iwsim::nlos
