#include <algorithm>
#include <limits>

#include "iwsim/mac/access.hpp"
#include "iwsim/mac/network.hpp"

namespace iwsim::mac {
namespace {

class PcfRun {
 public:
  PcfRun(const Scenario& scenario, const PhyParams& phy)
      : scenario_(scenario), phy_(phy), net_(scenario, sim_) {
    // The superframe follows the smallest MSI of any registered station.
    superframe_ = Duration::max();
    for (const Station& s : net_.stations()) superframe_ = std::min(superframe_, s.traffic.msi);
    if (net_.stations().empty()) superframe_ = std::min(scenario.safety.msi, scenario.ar.msi);
    cfp_max_ = Duration{static_cast<std::int64_t>(
        static_cast<double>(superframe_.count()) * scenario.pcf_cfp_fraction)};
  }

  LatencyStats run() {
    net_.start_traffic(nullptr);
    schedule_tbtt(SimTime{0});
    sim_.run_until(scenario_.duration);
    return net_.finish(scenario_.duration);
  }

 private:
  void schedule_tbtt(SimTime at) {
    if (at >= scenario_.duration) return;
    sim_.schedule(at, kBeacon, 0, [this, at] {
      schedule_tbtt(at + superframe_);
      // A response that overran the CFP delays the beacon.
      const SimTime start = std::max(sim_.now(), busy_until_);
      if (start > sim_.now()) {
        sim_.schedule(start, kBeacon, 1, [this, at] { open_cfp(at); });
      } else {
        open_cfp(at);
      }
    });
  }

  void open_cfp(SimTime tbtt) {
    ++epoch_;
    const SimTime beacon_start = std::max(sim_.now(), busy_until_) + phy_.pifs;
    const SimTime beacon_end = beacon_start + phy_.beacon_frame();
    net_.occupy(beacon_start, beacon_end);
    net_.count_beacon();
    busy_until_ = beacon_end + phy_.sifs;
    cfp_end_ = tbtt + cfp_max_;
    idle_polls_ = 0;
    schedule_poll(busy_until_);
  }

  void schedule_poll(SimTime at) {
    if (at >= scenario_.duration) return;
    sim_.schedule(at, kPoll, 0, [this, epoch = epoch_] {
      if (epoch == epoch_) poll_next();
    });
  }

  void poll_next() {
    const SimTime t = sim_.now();
    const Duration min_exchange = phy_.control_frame() + phy_.sifs + phy_.control_frame();
    const std::size_t n = net_.stations().size();
    // CF-End once a whole round came back empty or the CFP is used up; the
    // round position carries over to the next CFP.
    if (n == 0 || idle_polls_ >= n || t + min_exchange > cfp_end_) {
      const SimTime end = t + phy_.control_frame();
      net_.occupy(t, end);
      busy_until_ = end;
      return;
    }
    const int id = net_.stations()[next_].id;
    next_ = (next_ + 1) % n;
    const PollResult r = poll_station(net_, phy_, id, t, Duration::max() / 4, 1);
    idle_polls_ = r.msdus == 0 ? idle_polls_ + 1 : 0;
    busy_until_ = r.end;
    schedule_poll(r.end);
  }

  const Scenario& scenario_;
  const PhyParams& phy_;
  Simulator sim_;
  Network net_;
  Duration superframe_{0};
  Duration cfp_max_{0};
  SimTime cfp_end_{0};
  SimTime busy_until_{0};
  std::size_t next_ = 0;
  std::size_t idle_polls_ = 0;
  std::uint64_t epoch_ = 0;
};

}  // namespace

LatencyStats run_pcf(const Scenario& scenario, const PhyParams& phy) {
  phy.validate();
  return PcfRun(scenario, phy).run();
}

}  // namespace iwsim::mac
