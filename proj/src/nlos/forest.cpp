#include "iwsim/nlos/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "iwsim/core/rng.hpp"

namespace iwsim::nlos {

namespace {

using Row = std::array<double, kFeatureCount>;

struct Counts {
  std::size_t los = 0;
  std::size_t nlos = 0;

  std::size_t total() const { return los + nlos; }
  void add(Label l) { l == Label::LOS ? ++los : ++nlos; }
  Label majority() const { return nlos > los ? Label::NLOS : Label::LOS; }
};

double gini(std::size_t a, std::size_t b) {
  const double n = static_cast<double>(a + b);
  if (n == 0.0) return 0.0;
  const double pa = static_cast<double>(a) / n;
  const double pb = static_cast<double>(b) / n;
  return 1.0 - pa * pa - pb * pb;
}

struct Best {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<Row>& x, const std::vector<Label>& y, const std::vector<int>& features,
              const ForestParams& p, Rng& rng)
      : x_(x), y_(y), features_(features), p_(p), rng_(rng) {
    mtry_ = p.feature_subsampling
                ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(features.size()))))
                : features.size();
  }

  DecisionTree build(std::vector<std::size_t> idx) {
    grow(idx, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& idx, int depth) {
    Counts c;
    for (std::size_t i : idx) c.add(y_[i]);
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{-1, 0.0, -1, -1, c.majority()});

    const std::size_t min_leaf = static_cast<std::size_t>(p_.min_leaf);
    if (depth >= p_.max_depth || c.los == 0 || c.nlos == 0 || idx.size() < 2 * min_leaf) return id;
    const Best best = find_split(idx, c);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (x_[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<int> candidates() {
    if (!p_.feature_subsampling) return features_;
    std::vector<int> f = features_;
    // Partial Fisher-Yates: the first mtry_ entries are the draw.
    for (std::size_t i = 0; i < mtry_ && i + 1 < f.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.uniform_int(f.size() - 1 - i));
      std::swap(f[i], f[j]);
    }
    f.resize(mtry_);
    return f;
  }

  Best find_split(const std::vector<std::size_t>& idx, const Counts& parent) {
    const std::size_t n = idx.size();
    const std::size_t min_leaf = static_cast<std::size_t>(p_.min_leaf);
    Best best;
    best.impurity = gini(parent.los, parent.nlos);
    std::vector<std::pair<double, std::size_t>> col(n);
    for (int f : candidates()) {
      for (std::size_t k = 0; k < n; ++k) col[k] = {x_[idx[k]][static_cast<std::size_t>(f)], idx[k]};
      std::sort(col.begin(), col.end());
      Counts left;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left.add(y_[col[k].second]);
        const std::size_t nl = k + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double a = col[k].first;
        const double b = col[k + 1].first;
        if (!(a < b)) continue;
        const double g = (static_cast<double>(nl) * gini(left.los, left.nlos) +
                          static_cast<double>(nr) * gini(parent.los - left.los, parent.nlos - left.nlos)) /
                         static_cast<double>(n);
        if (g < best.impurity - 1e-15) {
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = Best{f, t, g};
        }
      }
    }
    return best;
  }

  const std::vector<Row>& x_;
  const std::vector<Label>& y_;
  const std::vector<int>& features_;
  const ForestParams& p_;
  Rng& rng_;
  std::size_t mtry_ = 1;
  DecisionTree tree_;
};

}  // namespace

void ForestParams::validate() const {
  if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
}

Label DecisionTree::predict(const std::array<double, kFeatureCount>& x) const {
  std::size_t i = 0;
  while (!nodes[i].leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].label;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

Forest train_forest(const std::vector<Sample>& data, FeatureSubset subset, const ForestParams& params,
                    std::uint64_t seed, unsigned threads) {
  params.validate();
  std::vector<Row> x;
  std::vector<Label> y;
  Counts counts;
  for (const Sample& s : data) {
    if (s.label == Label::Unknown) continue;
    x.push_back(s.features.values());
    y.push_back(s.label);
    counts.add(s.label);
  }
  if (counts.los == 0 || counts.nlos == 0) {
    throw SingleClassData("training data must contain both LOS and NLOS samples (got " +
                          std::to_string(counts.los) + " LOS, " + std::to_string(counts.nlos) + " NLOS)");
  }
  std::vector<int> features;
  for (Feature f : subset_features(subset)) features.push_back(static_cast<int>(f));

  Forest forest;
  forest.subset = subset;
  forest.params = params;
  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  forest.trees.resize(n_trees);
  forest.tree_seeds.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) forest.tree_seeds[t] = derive_seed(seed, t);

  const std::size_t n = x.size();
  auto build = [&](std::size_t t) {
    Rng rng(forest.tree_seeds[t]);
    std::vector<std::size_t> idx(n);
    if (params.bootstrap) {
      for (std::size_t& i : idx) i = static_cast<std::size_t>(rng.uniform_int(n - 1));
    } else {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    forest.trees[t] = TreeBuilder(x, y, features, params, rng).build(std::move(idx));
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_trees)));
  if (workers == 1) {
    for (std::size_t t = 0; t < n_trees; ++t) build(t);
    return forest;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < n_trees; t = next++) build(t);
    });
  }
  for (auto& th : pool) th.join();
  return forest;
}

Label classify(const Forest& forest, const FeatureVector& features) {
  const Row x = features.values();
  std::size_t nlos = 0;
  for (const DecisionTree& t : forest.trees) nlos += t.predict(x) == Label::NLOS ? 1 : 0;
  return 2 * nlos > forest.trees.size() ? Label::NLOS : Label::LOS;
}

Label classify(const Forest& forest, const FeatureMap& features) {
  FeatureVector v;
  for (Feature f : subset_features(forest.subset)) {
    const auto it = features.find(f);
    if (it == features.end()) {
      throw MissingFeature("feature '" + to_string(f) + "' required by subset " + to_string(forest.subset) +
                           " is missing");
    }
    switch (f) {
      case Feature::Mu: v.mu = it->second; break;
      case Feature::Sigma: v.sigma = it->second; break;
      case Feature::Skewness: v.s = it->second; break;
      case Feature::Kurtosis: v.kappa = it->second; break;
    }
  }
  return classify(forest, v);
}

}  // namespace iwsim::nlos
