#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "iwsim/core/time.hpp"

namespace iwsim::mac {

/// PHY timing used by every access method. Defaults are the 5 GHz OFDM
/// values; `frame_overhead` covers preamble plus MAC header and FCS.
struct PhyParams {
  Duration slot = 9us;
  Duration sifs = 16us;
  Duration difs = 34us;
  Duration pifs = 25us;
  double data_rate_mbps = 65.0;
  Duration ack = 44us;
  Duration beacon_interval = 48ms;
  Duration frame_overhead = 40us;
  std::size_t beacon_bytes = 100;
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit = 7;

  /// Airtime of one frame: overhead + payload bits at the data rate,
  /// rounded up to whole nanoseconds.
  Duration frame_time(std::size_t payload_bytes) const;
  /// DATA + SIFS + ACK.
  Duration data_exchange(std::size_t payload_bytes) const {
    return frame_time(payload_bytes) + sifs + ack;
  }
  /// Poll or QoS-Null frame (header only).
  Duration control_frame() const { return frame_overhead; }
  Duration beacon_frame() const { return frame_time(beacon_bytes); }

  /// Throws std::invalid_argument if difs != sifs + 2*slot,
  /// pifs != sifs + slot, or any value is out of range.
  void validate() const;
};

enum class TrafficKind { Safety, AR };

std::string_view to_string(TrafficKind kind);

/// Cyclic traffic source. Each period one burst of `burst_bytes` is generated
/// and fragmented into MSDUs of at most `msdu_bytes`.
struct TrafficClass {
  TrafficKind kind = TrafficKind::Safety;
  Duration period = 8ms;
  Duration msi = 8ms;
  std::size_t burst_bytes = 64;
  std::size_t msdu_bytes = 1500;
  /// true: every station of the class releases its first burst at t = 0
  /// (critical instant). false: per-station phase uniform over one period.
  bool aligned_release = false;

  std::size_t msdus_per_burst() const;
  /// Size of MSDU `index` (0-based) of a burst; the last one carries the rest.
  std::size_t msdu_size(std::size_t index) const;
  /// Mean offered rate in bytes per second.
  double mean_rate_bytes_per_s() const;

  void validate() const;

  static TrafficClass safety_default();
  static TrafficClass ar_default();
};

enum class Access { DCF, PCF, HCCA };
enum class SchedulerKind { Reference, EDF };

std::string_view to_string(Access access);
std::string_view to_string(SchedulerKind kind);
Access parse_access(std::string_view text);
SchedulerKind parse_scheduler(std::string_view text);

struct Scenario {
  int n_safety = 2;
  int n_ar = 5;
  Access access = Access::HCCA;
  SchedulerKind scheduler = SchedulerKind::Reference;
  Duration duration = 30s;
  std::uint64_t seed = 1;
  TrafficClass safety = TrafficClass::safety_default();
  TrafficClass ar = TrafficClass::ar_default();
  /// dot11CFPMaxDuration as a fraction of the PCF superframe. The remainder
  /// is the contention period, which stays idle because every station is
  /// CF-pollable.
  double pcf_cfp_fraction = 0.7;
  /// Upper bound of one EDF grant.
  Duration edf_txop_limit = 8ms;

  int station_count() const { return n_safety + n_ar; }
  void validate() const;
};

}  // namespace iwsim::mac
