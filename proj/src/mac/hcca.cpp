#include <algorithm>
#include <limits>
#include <stdexcept>

#include "iwsim/mac/access.hpp"
#include "iwsim/mac/network.hpp"
#include "iwsim/mac/scheduler.hpp"

namespace iwsim::mac {
namespace {

// Fixed polling table, rebuilt only when registrations change (never, within
// one run).
class ReferenceRun {
 public:
  ReferenceRun(const Scenario& scenario, const PhyParams& phy)
      : scenario_(scenario), phy_(phy), net_(scenario, sim_) {
    std::vector<FlowSpec> flows;
    for (const Station& s : net_.stations()) flows.push_back(flow_spec(s.id, s.traffic));
    table_ = reference_scheduler(flows, phy_, phy_.beacon_interval);
    if (flows.empty()) {
      per_beacon_ = 1;
    } else {
      per_beacon_ = static_cast<int>(phy_.beacon_interval / table_.service_interval);
    }
  }

  LatencyStats run() {
    net_.start_traffic(nullptr);
    schedule_si(0, 0);
    sim_.run_until(scenario_.duration);
    LatencyStats out = net_.finish(scenario_.duration);
    out.admitted_flows = static_cast<int>(table_.admitted.size());
    out.rejected_flows = static_cast<int>(table_.rejected.size());
    out.service_interval = table_.service_interval;
    return out;
  }

  const ScheduleTable& table() const { return table_; }

 private:
  // SI boundaries restart at every TBTT so a non-integer SI never drifts.
  void schedule_si(std::int64_t beacon_index, int si_index) {
    const SimTime at = beacon_index * phy_.beacon_interval + si_index * table_.service_interval;
    if (at >= scenario_.duration) return;
    sim_.schedule(at, kServiceInterval, static_cast<std::uint32_t>(si_index),
                  [this, beacon_index, si_index] {
                    if (si_index + 1 < per_beacon_) {
                      schedule_si(beacon_index, si_index + 1);
                    } else {
                      schedule_si(beacon_index + 1, 0);
                    }
                    start_cap(si_index == 0);
                  });
  }

  void start_cap(bool with_beacon) {
    SimTime t = std::max(sim_.now(), busy_until_) + phy_.pifs;
    if (with_beacon) {
      const SimTime end = t + phy_.beacon_frame();
      net_.occupy(t, end);
      net_.count_beacon();
      t = end + phy_.sifs;
    }
    busy_until_ = t;
    if (!table_.admitted.empty()) schedule_poll(0, t);
  }

  void schedule_poll(std::size_t index, SimTime at) {
    if (at >= scenario_.duration) return;
    sim_.schedule(at, kPoll, static_cast<std::uint32_t>(table_.admitted[index].station),
                  [this, index] {
                    const TxopGrant& g = table_.admitted[index];
                    const PollResult r = poll_station(net_, phy_, g.station, sim_.now(), g.txop,
                                                      std::numeric_limits<std::size_t>::max());
                    busy_until_ = r.end;
                    if (index + 1 < table_.admitted.size()) schedule_poll(index + 1, r.end);
                  });
  }

  const Scenario& scenario_;
  const PhyParams& phy_;
  Simulator sim_;
  Network net_;
  ScheduleTable table_;
  int per_beacon_ = 1;
  SimTime busy_until_{0};
};

// Work-conserving EDF: whenever the medium is free the HC grants the pending
// flow whose deadline (last service + MSI) is earliest. A grant covers the
// flow's whole backlog up to the TXOP limit.
class EdfRun {
 public:
  EdfRun(const Scenario& scenario, const PhyParams& phy)
      : scenario_(scenario), phy_(phy), net_(scenario, sim_) {
    std::vector<int> ids;
    std::vector<TrafficClass> traffic;
    for (const Station& s : net_.stations()) {
      ids.push_back(s.id);
      traffic.push_back(s.traffic);
    }
    admission_ = edf_admission(ids, traffic, phy_);
    admitted_.assign(net_.stations().size(), false);
    for (int id : admission_.admitted) admitted_[static_cast<std::size_t>(id)] = true;
    last_service_.assign(net_.stations().size(), SimTime{0});
  }

  LatencyStats run() {
    net_.start_traffic([this](int) { wake(); });
    schedule_tbtt(SimTime{0});
    sim_.run_until(scenario_.duration);
    LatencyStats out = net_.finish(scenario_.duration);
    out.admitted_flows = static_cast<int>(admission_.admitted.size());
    out.rejected_flows = static_cast<int>(admission_.rejected.size());
    return out;
  }

 private:
  void schedule_tbtt(SimTime at) {
    if (at >= scenario_.duration) return;
    sim_.schedule(at, kBeacon, 0, [this, at] {
      schedule_tbtt(at + phy_.beacon_interval);
      beacon_due_ = true;
      wake();
    });
  }

  // Starts a decision if the HC is idle.
  void wake() {
    if (active_) return;
    active_ = true;
    const SimTime at = std::max(sim_.now(), busy_until_);
    sim_.schedule(at, kGrant, 0, [this] { decide(sim_.now() + phy_.pifs); });
  }

  void decide(SimTime t) {
    if (beacon_due_) {
      beacon_due_ = false;
      const SimTime end = t + phy_.beacon_frame();
      net_.occupy(t, end);
      net_.count_beacon();
      t = end + phy_.sifs;
    }
    pending_.clear();
    for (const Station& s : net_.stations()) {
      if (admitted_[static_cast<std::size_t>(s.id)] && s.has_data()) {
        pending_.push_back(EdfCandidate{s.id, last_service_[static_cast<std::size_t>(s.id)] + s.traffic.msi});
      }
    }
    const auto pick = edf_select(pending_);
    if (!pick) {
      busy_until_ = t;
      active_ = false;
      return;
    }
    const int id = pending_[*pick].station;
    sim_.schedule(t, kPoll, static_cast<std::uint32_t>(id), [this, id] { grant(id); });
  }

  void grant(int id) {
    last_service_[static_cast<std::size_t>(id)] = sim_.now();
    // Always allow at least one MSDU so an oversized head never starves.
    const Duration one = msdu_exchange(phy_, net_.station(id).head_msdu_bytes());
    const Duration budget = std::max(scenario_.edf_txop_limit, one);
    const PollResult r = poll_station(net_, phy_, id, sim_.now(), budget,
                                      std::numeric_limits<std::size_t>::max());
    busy_until_ = r.end;
    if (r.end >= scenario_.duration) return;
    sim_.schedule(r.end, kGrant, 0, [this] { decide(sim_.now()); });
  }

  const Scenario& scenario_;
  const PhyParams& phy_;
  Simulator sim_;
  Network net_;
  EdfAdmission admission_;
  std::vector<bool> admitted_;
  std::vector<SimTime> last_service_;
  std::vector<EdfCandidate> pending_;
  SimTime busy_until_{0};
  bool active_ = false;
  bool beacon_due_ = false;
};

}  // namespace

LatencyStats run_hcca(const Scenario& scenario, const PhyParams& phy, SchedulerKind scheduler) {
  phy.validate();
  if (scheduler == SchedulerKind::Reference) return ReferenceRun(scenario, phy).run();
  return EdfRun(scenario, phy).run();
}

LatencyStats run_scenario(const Scenario& scenario, const PhyParams& phy) {
  switch (scenario.access) {
    case Access::DCF: return run_dcf(scenario, phy);
    case Access::PCF: return run_pcf(scenario, phy);
    case Access::HCCA: return run_hcca(scenario, phy, scenario.scheduler);
  }
  throw std::invalid_argument("unknown access method");
}

}  // namespace iwsim::mac
