#include "iwsim/mac/network.hpp"

#include <algorithm>

namespace iwsim::mac {

std::size_t Station::head_msdu_bytes() const {
  return traffic.msdu_size(queue.front().next_msdu);
}

std::size_t Station::queued_msdus() const {
  std::size_t total = 0;
  for (const Burst& b : queue) total += traffic.msdus_per_burst() - b.next_msdu;
  return total;
}

Network::Network(const Scenario& scenario, Simulator& sim)
    : scenario_(scenario),
      sim_(sim),
      safety_acc_(scenario.safety.msi),
      ar_acc_(scenario.ar.msi) {
  scenario.validate();
  const int n = scenario.station_count();
  stations_.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    Station s;
    s.id = id;
    s.traffic = id < scenario.n_safety ? scenario.safety : scenario.ar;
    stations_.push_back(std::move(s));
  }
}

void Network::start_traffic(std::function<void(int)> on_arrival) {
  on_arrival_ = std::move(on_arrival);
  Rng phases(derive_seed(scenario_.seed, 0x7068617365ULL));
  for (const Station& s : stations_) {
    const auto period = static_cast<std::uint64_t>(s.traffic.period.count());
    const std::uint64_t draw = phases.uniform_int(period - 1);
    const SimTime first{s.traffic.aligned_release ? 0 : static_cast<std::int64_t>(draw)};
    schedule_arrival(s.id, first);
  }
}

void Network::schedule_arrival(int id, SimTime at) {
  if (at >= scenario_.duration) return;
  sim_.schedule(at, kArrival, static_cast<std::uint32_t>(id), [this, id] {
    Station& s = station(id);
    s.queue.push_back(Burst{sim_.now(), 0});
    acc(s).on_generated();
    schedule_arrival(id, sim_.now() + s.traffic.period);
    if (on_arrival_) on_arrival_(id);
  });
}

void Network::deliver_head_msdu(int id, SimTime ack_time) {
  Station& s = station(id);
  Burst& head = s.queue.front();
  ++head.next_msdu;
  if (head.next_msdu >= s.traffic.msdus_per_burst()) {
    acc(s).on_delivered(ack_time - head.generated);
    s.queue.pop_front();
  }
}

void Network::drop_head_burst(int id) {
  Station& s = station(id);
  acc(s).on_dropped();
  s.queue.pop_front();
}

void Network::occupy(SimTime start, SimTime end) {
  ++transmissions_;
  if (start < busy_until_) ++collisions_;
  busy_until_ = std::max(busy_until_, end);
}

LatencyStats Network::finish(SimTime end) {
  for (const Station& s : stations_) {
    for (const Burst& b : s.queue) acc(s).on_pending_at_end(end - b.generated);
  }
  LatencyStats out;
  out.safety = safety_acc_.summary();
  out.ar = ar_acc_.summary();
  out.transmissions = transmissions_;
  out.collisions = collisions_;
  out.beacons = beacons_;
  return out;
}

PollResult poll_station(Network& net, const PhyParams& phy, int id, SimTime start,
                        Duration budget, std::size_t max_bursts) {
  PollResult r;
  const SimTime poll_end = start + phy.control_frame();
  net.occupy(start, poll_end);
  SimTime t = poll_end + phy.sifs;
  const SimTime limit = t + budget;
  Station& s = net.station(id);
  std::size_t bursts_done = 0;
  while (s.has_data() && bursts_done < max_bursts) {
    const std::size_t bytes = s.head_msdu_bytes();
    const Duration exchange = phy.data_exchange(bytes) + phy.sifs;
    if (t + exchange > limit) break;
    const SimTime ack_end = t + phy.data_exchange(bytes);
    net.occupy(t, ack_end);
    const std::size_t before = s.queue.size();
    net.deliver_head_msdu(id, ack_end);
    if (s.queue.size() < before) ++bursts_done;
    ++r.msdus;
    t += exchange;
  }
  if (r.msdus == 0) {
    const SimTime null_end = t + phy.control_frame();
    net.occupy(t, null_end);
    t = null_end + phy.sifs;
  }
  r.end = t;
  return r;
}

}  // namespace iwsim::mac
