#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "iwsim/nlos/features.hpp"

namespace iwsim::nlos {

struct Sample {
  FeatureVector features;
  Label label = Label::Unknown;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 8;
  int min_leaf = 2;
  bool bootstrap = true;
  /// ceil(sqrt(|subset|)) candidates per split; all features when false.
  bool feature_subsampling = true;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // Feature index, -1 for a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  Label label = Label::LOS;

  bool leaf() const { return feature < 0; }
};

/// Node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  Label predict(const std::array<double, kFeatureCount>& x) const;
  int depth() const;
};

struct Forest {
  FeatureSubset subset = FeatureSubset::S4;
  ForestParams params;
  std::vector<std::uint64_t> tree_seeds;
  std::vector<DecisionTree> trees;
};

class SingleClassData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingFeature : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tree i grows from its own stream derive_seed(seed, i), so the forest does
/// not depend on `threads`. Samples labelled Unknown are ignored.
Forest train_forest(const std::vector<Sample>& data, FeatureSubset subset,
                    const ForestParams& params, std::uint64_t seed, unsigned threads = 1);

/// Majority vote; an exact tie goes to LOS.
Label classify(const Forest& forest, const FeatureVector& features);
/// Throws MissingFeature when a dimension the forest uses is absent.
Label classify(const Forest& forest, const FeatureMap& features);

}  // namespace iwsim::nlos
