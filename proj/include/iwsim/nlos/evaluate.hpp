#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "iwsim/nlos/forest.hpp"

namespace iwsim::nlos {

struct EvalOptions {
  double train_fraction = 0.7;
  ForestParams forest;
};

struct SubsetAccuracy {
  FeatureSubset subset = FeatureSubset::S4;
  double los_acc = 0.0;
  double nlos_acc = 0.0;
  double overall = 0.0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class shuffle, then the first round(fraction * n_class) go to training.
Split stratified_split(const std::vector<Label>& labels, double train_fraction, std::uint64_t seed);

/// Every subset is trained and tested on the same split.
std::vector<SubsetAccuracy> evaluate_subsets(const std::vector<Cir>& cirs,
                                             const std::vector<FeatureSubset>& subsets,
                                             const EvalOptions& options, std::uint64_t seed,
                                             unsigned threads = 1);

inline constexpr const char* kAccuracyCsvHeader = "subset,los_acc,nlos_acc,overall";
void write_accuracy_csv(std::ostream& out, const std::vector<SubsetAccuracy>& rows);

}  // namespace iwsim::nlos
