#include <algorithm>
#include <optional>

#include "iwsim/mac/access.hpp"
#include "iwsim/mac/network.hpp"

namespace iwsim::mac {
namespace {

class DcfRun {
 public:
  DcfRun(const Scenario& scenario, const PhyParams& phy)
      : scenario_(scenario),
        phy_(phy),
        net_(scenario, sim_),
        rng_(derive_seed(scenario.seed, 0x646366ULL)),
        st_(net_.stations().size()) {
    for (Contender& c : st_) c.cw = phy_.cw_min;
  }

  LatencyStats run() {
    net_.start_traffic([this](int id) { on_arrival(id); });
    sim_.run_until(scenario_.duration);
    return net_.finish(scenario_.duration);
  }

 private:
  struct Contender {
    bool active = false;    // holds an MSDU awaiting transmission
    bool counting = false;  // medium idle, backoff counting down
    int backoff = 0;
    int cw = 15;
    int retries = 0;
    SimTime count_start{0};
    SimTime fire_time(Duration slot) const { return count_start + backoff * slot; }
  };

  int draw_backoff(int cw) {
    return static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(cw)));
  }

  // First slot boundary at or after `t` on the grid of the current idle period.
  SimTime align(SimTime t) const {
    if (!grid_origin_ || t <= *grid_origin_) return grid_origin_ ? *grid_origin_ : t;
    const auto slot = phy_.slot.count();
    const auto offset = (t - *grid_origin_).count();
    return *grid_origin_ + Duration{((offset + slot - 1) / slot) * slot};
  }

  void on_arrival(int id) {
    Contender& c = st_[static_cast<std::size_t>(id)];
    if (c.active) return;
    c.active = true;
    c.backoff = draw_backoff(c.cw);
    if (!busy_) start_counting(c, sim_.now() + phy_.difs);
    reschedule();
  }

  void start_counting(Contender& c, SimTime earliest) {
    const bool anyone_counting = std::any_of(st_.begin(), st_.end(),
                                             [](const Contender& o) { return o.counting; });
    if (!anyone_counting) grid_origin_.reset();
    if (!grid_origin_) grid_origin_ = earliest;
    c.counting = true;
    c.count_start = align(earliest);
  }

  void reschedule() {
    if (busy_) return;
    sim_.cancel(attempt_);
    std::optional<SimTime> next;
    for (const Contender& c : st_) {
      if (!c.counting) continue;
      const SimTime t = c.fire_time(phy_.slot);
      if (!next || t < *next) next = t;
    }
    if (next) attempt_ = sim_.schedule(*next, kTxStart, 0, [this] { tx_start(); });
  }

  void tx_start() {
    const SimTime t = sim_.now();
    std::vector<int> winners;
    for (std::size_t i = 0; i < st_.size(); ++i) {
      Contender& c = st_[i];
      if (!c.counting) continue;
      if (c.fire_time(phy_.slot) == t) {
        winners.push_back(static_cast<int>(i));
      } else if (t > c.count_start) {
        c.backoff -= static_cast<int>((t - c.count_start) / phy_.slot);
      }
      c.counting = false;
    }
    busy_ = true;
    grid_origin_.reset();

    Duration longest{0};
    for (int id : winners) {
      const Duration frame = phy_.frame_time(net_.station(id).head_msdu_bytes());
      longest = std::max(longest, frame);
    }
    // A collision costs the longest frame plus the ACK timeout.
    const SimTime end = t + longest + phy_.sifs + phy_.ack;
    for (std::size_t k = 0; k < winners.size(); ++k) net_.occupy(t, end);
    const bool success = winners.size() == 1;
    const auto first = static_cast<std::uint32_t>(winners.front());
    sim_.schedule(end, kTxEnd, first,
                  [this, winners = std::move(winners), success] { tx_end(winners, success); });
  }

  void tx_end(const std::vector<int>& winners, bool success) {
    busy_ = false;
    for (int id : winners) {
      Contender& c = st_[static_cast<std::size_t>(id)];
      if (success) {
        net_.deliver_head_msdu(id, sim_.now());
        c.cw = phy_.cw_min;
        c.retries = 0;
      } else if (++c.retries > phy_.retry_limit) {
        net_.drop_head_burst(id);
        c.cw = phy_.cw_min;
        c.retries = 0;
      } else {
        c.cw = std::min(2 * c.cw + 1, phy_.cw_max);
      }
      c.active = net_.station(id).has_data();
      if (c.active) c.backoff = draw_backoff(c.cw);
    }
    const SimTime resume = sim_.now() + phy_.difs;
    for (Contender& c : st_) {
      if (c.active) start_counting(c, resume);
    }
    reschedule();
  }

  const Scenario& scenario_;
  const PhyParams& phy_;
  Simulator sim_;
  Network net_;
  Rng rng_;
  std::vector<Contender> st_;
  bool busy_ = false;
  std::optional<SimTime> grid_origin_;
  EventHandle attempt_;
};

}  // namespace

LatencyStats run_dcf(const Scenario& scenario, const PhyParams& phy) {
  phy.validate();
  return DcfRun(scenario, phy).run();
}

}  // namespace iwsim::mac
