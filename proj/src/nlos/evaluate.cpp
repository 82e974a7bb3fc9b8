#include "iwsim/nlos/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "iwsim/core/rng.hpp"

namespace iwsim::nlos {

Split stratified_split(const std::vector<Label>& labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must be in (0, 1)");
  }
  Split split;
  std::uint64_t stream = 0;
  for (Label cls : {Label::LOS, Label::NLOS}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    Rng rng(derive_seed(seed, stream++));
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.uniform_int(i - 1))]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  return split;
}

std::vector<SubsetAccuracy> evaluate_subsets(const std::vector<Cir>& cirs,
                                             const std::vector<FeatureSubset>& subsets,
                                             const EvalOptions& options, std::uint64_t seed,
                                             unsigned threads) {
  std::vector<Sample> samples;
  std::vector<Label> labels;
  samples.reserve(cirs.size());
  for (const Cir& c : cirs) {
    samples.push_back(Sample{extract_features(c.taps), c.label});
    labels.push_back(c.label);
  }
  const Split split = stratified_split(labels, options.train_fraction, derive_seed(seed, 0x5350));
  std::vector<Sample> train;
  for (std::size_t i : split.train) train.push_back(samples[i]);

  std::vector<SubsetAccuracy> out;
  for (FeatureSubset subset : subsets) {
    const Forest forest = train_forest(train, subset, options.forest,
                                       derive_seed(seed, 0x1000 + static_cast<std::uint64_t>(subset)), threads);
    std::size_t n[2] = {0, 0};
    std::size_t ok[2] = {0, 0};
    for (std::size_t i : split.test) {
      const std::size_t cls = samples[i].label == Label::LOS ? 0 : 1;
      ++n[cls];
      ok[cls] += classify(forest, samples[i].features) == samples[i].label ? 1 : 0;
    }
    SubsetAccuracy acc;
    acc.subset = subset;
    acc.los_acc = n[0] ? static_cast<double>(ok[0]) / static_cast<double>(n[0]) : 0.0;
    acc.nlos_acc = n[1] ? static_cast<double>(ok[1]) / static_cast<double>(n[1]) : 0.0;
    const std::size_t total = n[0] + n[1];
    acc.overall = total ? static_cast<double>(ok[0] + ok[1]) / static_cast<double>(total) : 0.0;
    out.push_back(acc);
  }
  return out;
}

void write_accuracy_csv(std::ostream& out, const std::vector<SubsetAccuracy>& rows) {
  out << kAccuracyCsvHeader << '\n';
  char buf[128];
  for (const SubsetAccuracy& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f\n", to_string(r.subset).c_str(), r.los_acc,
                  r.nlos_acc, r.overall);
    out << buf;
  }
}

}  // namespace iwsim::nlos
