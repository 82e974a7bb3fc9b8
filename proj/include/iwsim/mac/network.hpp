#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

#include "iwsim/core/rng.hpp"
#include "iwsim/core/simulator.hpp"
#include "iwsim/mac/params.hpp"
#include "iwsim/mac/stats.hpp"

namespace iwsim::mac {

// Event kinds used in MAC traces.
enum EventKind : std::uint32_t {
  kArrival = 1,
  kTxStart = 2,
  kTxEnd = 3,
  kBeacon = 4,
  kPoll = 5,
  kServiceInterval = 6,
  kGrant = 7,
};

struct Burst {
  SimTime generated{0};
  std::size_t next_msdu = 0;  // index of the next MSDU to send
};

struct Station {
  int id = 0;
  TrafficClass traffic;
  std::deque<Burst> queue;  // FIFO

  bool has_data() const { return !queue.empty(); }
  std::size_t head_msdu_bytes() const;
  std::size_t queued_msdus() const;
};

/// Stations, their traffic generators, and the per-class statistics shared by
/// every access method. Station ids 0..n_safety-1 are safety stations, the
/// rest are AR stations.
class Network {
 public:
  Network(const Scenario& scenario, Simulator& sim);

  std::vector<Station>& stations() { return stations_; }
  const std::vector<Station>& stations() const { return stations_; }
  Station& station(int id) { return stations_[static_cast<std::size_t>(id)]; }

  /// Schedules the periodic generators. `on_arrival(id)` runs after a burst
  /// has been appended to station `id`'s queue. Generation phases are drawn
  /// uniformly over one period from the scenario seed.
  void start_traffic(std::function<void(int)> on_arrival);

  /// Head MSDU of `id` acknowledged at `ack_time`.
  void deliver_head_msdu(int id, SimTime ack_time);
  /// Discards the head burst (retry limit).
  void drop_head_burst(int id);

  /// Records a channel occupation [start, end) and counts overlaps with the
  /// previous occupation.
  void occupy(SimTime start, SimTime end);
  void count_beacon() { ++beacons_; }

  LatencyStats finish(SimTime end);

 private:
  ClassAccumulator& acc(const Station& s) {
    return s.traffic.kind == TrafficKind::Safety ? safety_acc_ : ar_acc_;
  }
  void schedule_arrival(int id, SimTime at);

  const Scenario& scenario_;
  Simulator& sim_;
  std::vector<Station> stations_;
  std::function<void(int)> on_arrival_;
  ClassAccumulator safety_acc_;
  ClassAccumulator ar_acc_;
  SimTime busy_until_{0};
  std::uint64_t transmissions_ = 0;
  std::uint64_t collisions_ = 0;
  std::uint64_t beacons_ = 0;
};

struct PollResult {
  SimTime end{0};  // medium free again (after the trailing SIFS)
  int msdus = 0;   // MSDUs delivered; 0 means a QoS-Null answered the poll
};

/// Contention-free poll of station `id` starting at `start`: poll frame,
/// SIFS, then MSDU exchanges while the next one still fits `budget` (counted
/// from the end of the poll) and fewer than `max_bursts` bursts have
/// completed. A station with nothing to send answers with a null frame.
PollResult poll_station(Network& net, const PhyParams& phy, int id, SimTime start,
                        Duration budget, std::size_t max_bursts);

}  // namespace iwsim::mac
