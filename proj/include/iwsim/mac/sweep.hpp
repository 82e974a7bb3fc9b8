#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "iwsim/mac/params.hpp"
#include "iwsim/mac/stats.hpp"

namespace iwsim::mac {

/// Inclusive range `first..last` with `step`.
struct IntRange {
  int first = 5;
  int last = 50;
  int step = 5;

  std::vector<int> values() const;
  /// Parses "A..B[:step]" or a single integer.
  static IntRange parse(const std::string& text);
};

struct SweepPoint {
  int n_ar = 0;
  LatencyStats stats;
};

/// Runs `base` once per n_ar in `range`. Every point reuses the base seed, so
/// points differ only in the station count. Points run on up to `threads`
/// workers; the result order follows `range`, not completion.
std::vector<SweepPoint> sweep(const Scenario& base, const PhyParams& phy, const IntRange& range,
                              unsigned threads = 1);

inline constexpr const char* kSweepCsvHeader = "n_ar,class,mean_ms,max_ms,miss_rate,samples";

/// One row per (n_ar, class), safety first.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace iwsim::mac
