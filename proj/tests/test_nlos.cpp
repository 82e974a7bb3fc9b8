#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "iwsim/core/rng.hpp"
#include "iwsim/nlos/dataset.hpp"
#include "iwsim/nlos/evaluate.hpp"
#include "iwsim/nlos/features.hpp"
#include "iwsim/nlos/forest.hpp"

using namespace iwsim;
using namespace iwsim::nlos;

namespace {

struct Oracle {
  double mu, sigma, s, kappa;
};

// Two-pass central moments in extended precision.
Oracle oracle_moments(const std::vector<double>& a) {
  long double mean = 0;
  for (double x : a) mean += x;
  mean /= static_cast<long double>(a.size());
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double x : a) {
    const long double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const auto n = static_cast<long double>(a.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const long double sd = std::sqrt(m2);
  return {static_cast<double>(mean), static_cast<double>(sd), static_cast<double>(m3 / (sd * sd * sd)),
          static_cast<double>(m4 / (m2 * m2))};
}

Cir cir_from_amplitudes(const std::vector<double>& a, Label l) {
  Cir c;
  c.label = l;
  for (double x : a) c.taps.emplace_back(x, 0.0);
  return c;
}

std::vector<Sample> samples_of(const std::vector<Cir>& cirs) {
  std::vector<Sample> out;
  for (const Cir& c : cirs) out.push_back({extract_features(c.taps), c.label});
  return out;
}

Label majority(std::size_t los, std::size_t nlos) { return nlos > los ? Label::NLOS : Label::LOS; }

double gini(std::size_t a, std::size_t b) {
  const double n = static_cast<double>(a + b);
  if (n == 0.0) return 0.0;
  const double pa = static_cast<double>(a) / n, pb = static_cast<double>(b) / n;
  return 1.0 - pa * pa - pb * pb;
}

// Plain recursive CART: every feature, every threshold, counts by brute force.
struct OracleTree {
  const std::vector<Sample>& data;
  std::vector<Feature> features;
  int max_depth;
  std::size_t min_leaf;

  Label predict(const std::vector<std::size_t>& idx, int depth, const FeatureVector& x) const {
    std::size_t los = 0, nlos = 0;
    for (std::size_t i : idx) (data[i].label == Label::LOS ? los : nlos)++;
    if (depth >= max_depth || los == 0 || nlos == 0 || idx.size() < 2 * min_leaf) return majority(los, nlos);
    double best = gini(los, nlos);
    int best_f = -1;
    double best_t = 0;
    for (Feature f : features) {
      std::vector<double> vals;
      for (std::size_t i : idx) vals.push_back(data[i].features[f]);
      std::sort(vals.begin(), vals.end());
      for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        const double a = vals[k], b = vals[k + 1];
        if (!(a < b)) continue;
        double t = a + (b - a) / 2.0;
        if (!(t < b)) t = a;
        std::size_t ll = 0, ln = 0, rl = 0, rn = 0;
        for (std::size_t i : idx) {
          const bool left = data[i].features[f] <= t;
          const bool is_los = data[i].label == Label::LOS;
          (left ? (is_los ? ll : ln) : (is_los ? rl : rn))++;
        }
        if (ll + ln < min_leaf || rl + rn < min_leaf) continue;
        const double n = static_cast<double>(idx.size());
        const double g = (static_cast<double>(ll + ln) * gini(ll, ln) + static_cast<double>(rl + rn) * gini(rl, rn)) / n;
        if (g < best - 1e-15) {
          best = g;
          best_f = static_cast<int>(f);
          best_t = t;
        }
      }
    }
    if (best_f < 0) return majority(los, nlos);
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) (data[i].features[static_cast<Feature>(best_f)] <= best_t ? left : right).push_back(i);
    return x[static_cast<Feature>(best_f)] <= best_t ? predict(left, depth + 1, x) : predict(right, depth + 1, x);
  }
};

DecisionTree leaf(Label l) {
  DecisionTree t;
  t.nodes.push_back(TreeNode{-1, 0.0, -1, -1, l});
  return t;
}

}  // namespace

TEST_CASE("moment features of small samples") {
  const FeatureVector c = moment_features(std::vector<double>{1, 1, 1, 1});
  CHECK(c.mu == 1.0);
  CHECK(c.sigma == 0.0);
  CHECK(c.s == 0.0);
  CHECK(c.kappa == 0.0);
  CHECK(c.degenerate);
  const FeatureVector two = moment_features(std::vector<double>{0, 2});
  CHECK(two.mu == 1.0);
  CHECK(two.sigma == 1.0);
  CHECK(two.s == 0.0);
  CHECK(two.kappa == 1.0);
  CHECK_FALSE(two.degenerate);
  CHECK_THROWS_AS(moment_features(std::vector<double>{3}), std::invalid_argument);
}

TEST_CASE("moment features match the direct definition") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::complex<double>> taps(8 + rng.uniform_int(24));
    for (auto& t : taps) t = {rng.normal() * (1 + rng.uniform()), rng.normal()};
    std::vector<double> amp;
    for (const auto& t : taps) amp.push_back(std::abs(t));
    const FeatureVector f = extract_features(taps);
    const Oracle o = oracle_moments(amp);
    CHECK(std::abs(f.mu - o.mu) < 1e-12);
    CHECK(std::abs(f.sigma - o.sigma) < 1e-12);
    CHECK(std::abs(f.s - o.s) < 1e-12);
    CHECK(std::abs(f.kappa - o.kappa) < 1e-12);
  }
}

TEST_CASE("shape features are scale invariant") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::complex<double>> taps(16);
    for (auto& t : taps) t = {rng.normal(), rng.normal()};
    const double scale = rng.uniform(0.01, 100.0);
    std::vector<std::complex<double>> scaled = taps;
    for (auto& t : scaled) t *= scale;
    const FeatureVector a = extract_features(taps), b = extract_features(scaled);
    CHECK(b.mu == doctest::Approx(scale * a.mu).epsilon(1e-12));
    CHECK(b.sigma == doctest::Approx(scale * a.sigma).epsilon(1e-12));
    CHECK(std::abs(b.s - a.s) < 1e-12);
    CHECK(std::abs(b.kappa - a.kappa) < 1e-12);
  }
}

TEST_CASE("synthetic dataset: size, balance, determinism") {
  SyntheticCirParams p;
  p.n_per_class = 500;
  const auto a = generate_dataset(p);
  CHECK(a.size() == 1000);
  CHECK(std::count_if(a.begin(), a.end(), [](const Cir& c) { return c.label == Label::LOS; }) == 500);
  for (const Cir& c : a) CHECK_NOTHROW(c.validate());
  const auto b = generate_dataset(p);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i].taps == b[i].taps && a[i].label == b[i].label;
  CHECK(same);
  p.seed = 2;
  CHECK(generate_dataset(p)[0].taps != a[0].taps);
  p.n_per_class = 99;
  CHECK_THROWS_AS(generate_dataset(p), std::invalid_argument);
}

TEST_CASE("LOS first tap follows the configured Rician factor") {
  for (double k_db : {3.0, 6.0, 9.0}) {
    SyntheticCirParams p;
    p.los_k_db = k_db;
    std::vector<std::complex<double>> h0;
    for (const Cir& c : generate_dataset(p)) {
      if (c.label == Label::LOS) h0.push_back(c.taps[0]);
    }
    CHECK(std::abs(10.0 * std::log10(estimate_k_factor(h0)) - k_db) < 1.0);
  }
}

TEST_CASE("CIR file round trip and format errors") {
  SyntheticCirParams p;
  p.n_per_class = 100;
  const auto cirs = generate_dataset(p);
  std::stringstream buf;
  write_cirs(buf, cirs);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 8 + cirs.size() * (16 * 16 + 1));
  CHECK(static_cast<unsigned char>(bytes[0]) == 200);
  CHECK(static_cast<unsigned char>(bytes[4]) == 16);
  std::stringstream in(bytes);
  const auto back = read_cirs(in);
  REQUIRE(back.size() == cirs.size());
  for (std::size_t i = 0; i < cirs.size(); ++i) {
    CHECK(back[i].taps == cirs[i].taps);
    CHECK(back[i].label == cirs[i].label);
  }
  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_cirs(cut), CirFormatError);
  std::string bad = bytes;
  bad[8 + 16 * 16] = 7;
  std::stringstream badlabel(bad);
  CHECK_THROWS_AS(read_cirs(badlabel), CirFormatError);
}

TEST_CASE("separable one-feature toy set is learned exactly") {
  std::vector<Sample> data;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    FeatureVector f;
    f.sigma = rng.uniform(0.0, 1.0);
    data.push_back({f, f.sigma < 0.3 ? Label::LOS : Label::NLOS});
  }
  ForestParams p;
  p.n_trees = 15;
  p.max_depth = 1;
  p.min_leaf = 1;
  const Forest forest = train_forest(data, FeatureSubset::S1, p, 9);
  int correct = 0;
  for (const Sample& s : data) correct += classify(forest, s.features) == s.label;
  CHECK(correct == 200);
}

TEST_CASE("one tree without bagging equals plain CART") {
  SyntheticCirParams gp;
  gp.n_per_class = 150;
  const auto data = samples_of(generate_dataset(gp));
  for (FeatureSubset subset : kAllSubsets) {
    ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.feature_subsampling = false;
    p.max_depth = 5;
    const Forest forest = train_forest(data, subset, p, 77);
    const OracleTree oracle{data, subset_features(subset), p.max_depth, static_cast<std::size_t>(p.min_leaf)};
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      const Sample& s = data[static_cast<std::size_t>(rng.uniform_int(data.size() - 1))];
      CHECK(classify(forest, s.features) == oracle.predict(all, 0, s.features));
    }
    CHECK(forest.trees[0].depth() <= 5);
  }
}

TEST_CASE("forest structure is fixed by the seed, not by threads") {
  SyntheticCirParams gp;
  gp.n_per_class = 150;
  const auto data = samples_of(generate_dataset(gp));
  ForestParams p;
  p.n_trees = 12;
  const Forest a = train_forest(data, FeatureSubset::S4, p, 5, 1);
  const Forest b = train_forest(data, FeatureSubset::S4, p, 5, 4);
  const Forest c = train_forest(data, FeatureSubset::S4, p, 6, 1);
  REQUIRE(a.trees.size() == b.trees.size());
  bool same = true;
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    same = same && a.trees[t].nodes.size() == b.trees[t].nodes.size();
    for (std::size_t n = 0; same && n < a.trees[t].nodes.size(); ++n) {
      same = a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature &&
             a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold &&
             a.trees[t].nodes[n].label == b.trees[t].nodes[n].label;
    }
  }
  CHECK(same);
  CHECK(a.tree_seeds == b.tree_seeds);
  CHECK(a.tree_seeds != c.tree_seeds);
  for (const DecisionTree& t : a.trees) CHECK(t.depth() <= p.max_depth);
}

TEST_CASE("majority vote with ties to LOS") {
  Forest f;
  f.trees = {leaf(Label::LOS), leaf(Label::LOS), leaf(Label::NLOS)};
  CHECK(classify(f, FeatureVector{}) == Label::LOS);
  f.trees = {leaf(Label::LOS), leaf(Label::NLOS)};
  CHECK(classify(f, FeatureVector{}) == Label::LOS);
  f.trees = {leaf(Label::NLOS), leaf(Label::NLOS), leaf(Label::LOS)};
  CHECK(classify(f, FeatureVector{}) == Label::NLOS);
  f.trees = {leaf(Label::NLOS)};
  CHECK(classify(f, FeatureVector{}) == Label::NLOS);
}

TEST_CASE("classification needs every feature of the subset") {
  Forest f;
  f.subset = FeatureSubset::S2;
  f.trees = {leaf(Label::NLOS)};
  CHECK(classify(f, FeatureMap{{Feature::Skewness, 0.1}, {Feature::Kurtosis, 2.0}}) == Label::NLOS);
  CHECK_THROWS_AS(classify(f, FeatureMap{{Feature::Skewness, 0.1}}), MissingFeature);
}

TEST_CASE("single-class training data is rejected") {
  std::vector<Sample> data(10);
  for (auto& s : data) s.label = Label::LOS;
  CHECK_THROWS_AS(train_forest(data, FeatureSubset::S1, ForestParams{}, 1), SingleClassData);
  ForestParams bad;
  bad.max_depth = 0;
  data[0].label = Label::NLOS;
  CHECK_THROWS_AS(train_forest(data, FeatureSubset::S1, bad, 1), std::invalid_argument);
}

TEST_CASE("S2 predictions ignore received power") {
  SyntheticCirParams gp;
  gp.n_per_class = 300;
  const auto cirs = generate_dataset(gp);
  ForestParams p;
  p.n_trees = 25;
  const Forest f = train_forest(samples_of(cirs), FeatureSubset::S2, p, 3);
  for (double scale : {2.0, 0.125, 3.7}) {
    int differ = 0;
    for (const Cir& c : cirs) {
      auto scaled = c.taps;
      for (auto& t : scaled) t *= scale;
      differ += classify(f, extract_features(c.taps)) != classify(f, extract_features(scaled));
    }
    CHECK(differ == 0);
  }
}

TEST_CASE("stratified split keeps class proportions") {
  std::vector<Label> labels;
  for (int i = 0; i < 300; ++i) labels.push_back(i < 100 ? Label::LOS : Label::NLOS);
  const Split s = stratified_split(labels, 0.7, 1);
  CHECK(s.train.size() + s.test.size() == 300);
  const auto los_train = std::count_if(s.train.begin(), s.train.end(), [&](std::size_t i) { return labels[i] == Label::LOS; });
  CHECK(los_train == 70);
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK_THROWS_AS(stratified_split(labels, 1.0, 1), std::invalid_argument);
}

TEST_CASE("no overlap in sigma gives a perfect S1 classifier") {
  Rng rng(5);
  std::vector<Cir> cirs;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> a(16);
    const bool los = i % 2 == 0;
    for (double& x : a) x = los ? 1.0 + 0.05 * rng.uniform() : 1.0 + 2.0 * rng.uniform();
    cirs.push_back(cir_from_amplitudes(a, los ? Label::LOS : Label::NLOS));
  }
  const auto acc = evaluate_subsets(cirs, {FeatureSubset::S1}, EvalOptions{}, 1);
  REQUIRE(acc.size() == 1);
  CHECK(acc[0].overall >= 0.99);
}

TEST_CASE("accuracy CSV is deterministic") {
  SyntheticCirParams gp;
  gp.n_per_class = 200;
  const auto cirs = generate_dataset(gp);
  EvalOptions o;
  o.forest.n_trees = 20;
  std::ostringstream a, b;
  write_accuracy_csv(a, evaluate_subsets(cirs, {kAllSubsets.begin(), kAllSubsets.end()}, o, 3, 1));
  write_accuracy_csv(b, evaluate_subsets(cirs, {kAllSubsets.begin(), kAllSubsets.end()}, o, 3, 4));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("subset,los_acc,nlos_acc,overall\nS1,", 0) == 0);
}

TEST_CASE("subset parsing") {
  CHECK(parse_subsets("s1, S4") == std::vector<FeatureSubset>{FeatureSubset::S1, FeatureSubset::S4});
  CHECK_THROWS_AS(parse_subset("s5"), std::invalid_argument);
  CHECK(subset_features(FeatureSubset::S3).size() == 3);
}
