#include "iwsim/mac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "iwsim/mac/access.hpp"

namespace iwsim::mac {

std::vector<int> IntRange::values() const {
  if (step <= 0) throw std::invalid_argument("range step must be positive");
  if (last < first) throw std::invalid_argument("range end precedes its start");
  std::vector<int> out;
  for (int v = first; v <= last; v += step) out.push_back(v);
  return out;
}

IntRange IntRange::parse(const std::string& text) {
  IntRange r;
  try {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      std::size_t used = 0;
      r.first = r.last = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      r.step = 1;
      return r;
    }
    r.first = std::stoi(text.substr(0, dots));
    const std::string rest = text.substr(dots + 2);
    const auto colon = rest.find(':');
    r.last = std::stoi(rest.substr(0, colon));
    r.step = colon == std::string::npos ? 1 : std::stoi(rest.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed range '" + text + "' (expected A..B[:step])");
  }
  r.values();
  return r;
}

std::vector<SweepPoint> sweep(const Scenario& base, const PhyParams& phy, const IntRange& range,
                              unsigned threads) {
  const std::vector<int> ns = range.values();
  std::vector<SweepPoint> out(ns.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ns.size(); i = next++) {
      Scenario s = base;
      s.n_ar = ns[i];
      out[i] = SweepPoint{ns[i], run_scenario(s, phy)};
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ns.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return out;
}

namespace {
void row(std::ostream& out, int n_ar, const char* cls, const ClassStats& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%s,%.6f,%.6f,%.6f,%llu\n", n_ar, cls, s.mean_ms, s.max_ms,
                s.miss_rate(), static_cast<unsigned long long>(s.samples));
  out << buf;
}
}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << kSweepCsvHeader << '\n';
  for (const SweepPoint& p : points) {
    row(out, p.n_ar, "safety", p.stats.safety);
    row(out, p.n_ar, "ar", p.stats.ar);
  }
}

}  // namespace iwsim::mac
