#pragma once

#include <cstdint>
#include <vector>

#include "iwsim/core/time.hpp"
#include "iwsim/mac/params.hpp"

namespace iwsim::mac {

/// Per-class latency summary. Delay runs from burst generation to the ACK of
/// its last MSDU.
struct ClassStats {
  double mean_ms = 0.0;           // over delivered bursts
  double max_ms = 0.0;            // delivered delays and ages of bursts still queued at the end
  std::uint64_t samples = 0;      // delivered bursts
  std::uint64_t generated = 0;
  std::uint64_t dropped = 0;      // retry limit exceeded
  std::uint64_t in_queue = 0;     // undelivered at the end of the run
  std::uint64_t overdue_in_queue = 0;  // undelivered and already past the MSI
  std::uint64_t deadline_misses = 0;  // late deliveries + drops + overdue queued bursts

  /// Misses over bursts whose outcome is settled (delivered, dropped, or
  /// already past their deadline while queued).
  double miss_rate() const;
};

struct LatencyStats {
  ClassStats safety;
  ClassStats ar;
  std::uint64_t transmissions = 0;
  std::uint64_t collisions = 0;          // overlapping channel occupations
  std::uint64_t beacons = 0;
  int admitted_flows = 0;
  int rejected_flows = 0;                // HCCA admission control
  Duration service_interval{0};          // HCCA reference only

  const ClassStats& of(TrafficKind kind) const {
    return kind == TrafficKind::Safety ? safety : ar;
  }
  bool admission_failed() const { return rejected_flows > 0; }
};

/// Accumulates delays for one class.
class ClassAccumulator {
 public:
  explicit ClassAccumulator(Duration msi) : msi_(msi) {}

  void on_generated() { ++generated_; }
  void on_delivered(Duration delay);
  void on_dropped();
  void on_pending_at_end(Duration age);

  ClassStats summary() const;

 private:
  Duration msi_;
  std::uint64_t generated_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t in_queue_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t overdue_queued_ = 0;
  long double sum_ms_ = 0.0L;
  Duration max_{0};
};

}  // namespace iwsim::mac
