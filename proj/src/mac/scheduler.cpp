#include "iwsim/mac/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iwsim::mac {

FlowSpec flow_spec(int station, const TrafficClass& traffic) {
  return FlowSpec{station, traffic.msi, traffic.mean_rate_bytes_per_s(),
                  std::min(traffic.msdu_bytes, traffic.burst_bytes),
                  std::min(traffic.msdu_bytes, traffic.burst_bytes)};
}

Duration ScheduleTable::allocated() const {
  Duration total{0};
  for (const TxopGrant& g : admitted) total += g.poll + g.txop;
  return total;
}

Duration service_interval(Duration beacon_interval, Duration min_msi) {
  if (beacon_interval <= 0ns || min_msi <= 0ns) {
    throw std::invalid_argument("beacon interval and MSI must be positive");
  }
  const auto bi = beacon_interval.count();
  const auto msi = min_msi.count();
  const auto divisor = std::max<std::int64_t>(1, (bi + msi - 1) / msi);
  return Duration{bi / divisor};
}

Duration msdu_exchange(const PhyParams& phy, std::size_t bytes) {
  return phy.data_exchange(bytes) + phy.sifs;
}

ScheduleTable reference_scheduler(std::span<const FlowSpec> flows, const PhyParams& phy,
                                  Duration beacon_interval) {
  ScheduleTable table;
  if (flows.empty()) {
    table.service_interval = beacon_interval;
    return table;
  }
  Duration min_msi = flows.front().msi;
  for (const FlowSpec& f : flows) min_msi = std::min(min_msi, f.msi);
  const Duration si = service_interval(beacon_interval, min_msi);
  table.service_interval = si;
  table.budget = si - (phy.pifs + phy.beacon_frame() + phy.sifs);

  const Duration poll = phy.control_frame() + phy.sifs;
  Duration used{0};
  for (const FlowSpec& f : flows) {
    if (f.nominal_msdu_bytes == 0) throw std::invalid_argument("flow with zero MSDU size");
    const double per_si = to_s(si) * f.mean_rate_bytes_per_s / static_cast<double>(f.nominal_msdu_bytes);
    // Guard against 2.0000000001 rounding up to 3.
    const int n = std::max(1, static_cast<int>(std::ceil(per_si - 1e-9)));
    const Duration txop = std::max(n * msdu_exchange(phy, f.nominal_msdu_bytes),
                                   msdu_exchange(phy, f.max_msdu_bytes));
    if (used + poll + txop <= table.budget) {
      used += poll + txop;
      table.admitted.push_back(TxopGrant{f.station, n, txop, poll});
    } else {
      table.rejected.push_back(f.station);
    }
  }
  return table;
}

std::optional<std::size_t> edf_select(std::span<const EdfCandidate> pending) {
  if (pending.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < pending.size(); ++i) {
    const EdfCandidate& c = pending[i];
    const EdfCandidate& b = pending[best];
    if (c.deadline < b.deadline || (c.deadline == b.deadline && c.station < b.station)) best = i;
  }
  return best;
}

EdfAdmission edf_admission(std::span<const int> stations,
                           std::span<const TrafficClass> traffic, const PhyParams& phy) {
  if (stations.size() != traffic.size()) {
    throw std::invalid_argument("edf_admission: stations/traffic size mismatch");
  }
  EdfAdmission out;
  out.utilization = to_s(phy.pifs + phy.beacon_frame() + phy.sifs) / to_s(phy.beacon_interval);
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const TrafficClass& t = traffic[i];
    Duration burst = phy.control_frame() + phy.sifs;
    for (std::size_t k = 0; k < t.msdus_per_burst(); ++k) burst += msdu_exchange(phy, t.msdu_size(k));
    const double density = to_s(burst) / to_s(std::min(t.period, t.msi));
    if (out.utilization + density <= 1.0) {
      out.utilization += density;
      out.admitted.push_back(stations[i]);
    } else {
      out.rejected.push_back(stations[i]);
    }
  }
  return out;
}

}  // namespace iwsim::mac
