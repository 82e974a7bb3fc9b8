#include "iwsim/mac/params.hpp"

#include <cmath>
#include <stdexcept>

namespace iwsim::mac {

Duration PhyParams::frame_time(std::size_t payload_bytes) const {
  // bits / (Mbit/s) = microseconds; scale to ns and round up.
  const double ns = static_cast<double>(payload_bytes) * 8.0 * 1000.0 / data_rate_mbps;
  return frame_overhead + Duration{static_cast<std::int64_t>(std::ceil(ns - 1e-9))};
}

void PhyParams::validate() const {
  if (slot <= 0ns || sifs <= 0ns || ack <= 0ns || beacon_interval <= 0ns) {
    throw std::invalid_argument("PHY durations must be positive");
  }
  if (data_rate_mbps <= 0.0) throw std::invalid_argument("data rate must be positive");
  if (difs != sifs + 2 * slot) throw std::invalid_argument("DIFS must equal SIFS + 2*slot");
  if (pifs != sifs + slot) throw std::invalid_argument("PIFS must equal SIFS + slot");
  if (cw_min < 1 || cw_max < cw_min) throw std::invalid_argument("need 1 <= CWmin <= CWmax");
  if (retry_limit < 0) throw std::invalid_argument("retry limit must be >= 0");
}

std::string_view to_string(TrafficKind kind) {
  return kind == TrafficKind::Safety ? "safety" : "ar";
}

std::size_t TrafficClass::msdus_per_burst() const {
  return (burst_bytes + msdu_bytes - 1) / msdu_bytes;
}

std::size_t TrafficClass::msdu_size(std::size_t index) const {
  const std::size_t n = msdus_per_burst();
  if (index + 1 < n) return msdu_bytes;
  return burst_bytes - (n - 1) * msdu_bytes;
}

double TrafficClass::mean_rate_bytes_per_s() const {
  return static_cast<double>(burst_bytes) / to_s(period);
}

void TrafficClass::validate() const {
  if (period <= 0ns) throw std::invalid_argument("generation period must be > 0");
  if (msi <= 0ns) throw std::invalid_argument("MSI must be > 0");
  if (burst_bytes == 0 || msdu_bytes == 0) {
    throw std::invalid_argument("burst and MSDU sizes must be > 0");
  }
}

TrafficClass TrafficClass::safety_default() {
  return TrafficClass{TrafficKind::Safety, 8ms, 8ms, 64, 1500};
}

// Calibrated AR load; see README ("MAC calibration").
TrafficClass TrafficClass::ar_default() {
  return TrafficClass{TrafficKind::AR, 50ms, 50ms, 2400, 600, true};
}

std::string_view to_string(Access access) {
  switch (access) {
    case Access::DCF: return "dcf";
    case Access::PCF: return "pcf";
    case Access::HCCA: return "hcca";
  }
  return "?";
}

std::string_view to_string(SchedulerKind kind) {
  return kind == SchedulerKind::Reference ? "ref" : "edf";
}

Access parse_access(std::string_view text) {
  if (text == "dcf") return Access::DCF;
  if (text == "pcf") return Access::PCF;
  if (text == "hcca") return Access::HCCA;
  throw std::invalid_argument("unknown access method '" + std::string(text) + "'");
}

SchedulerKind parse_scheduler(std::string_view text) {
  if (text == "ref" || text == "reference") return SchedulerKind::Reference;
  if (text == "edf") return SchedulerKind::EDF;
  throw std::invalid_argument("unknown scheduler '" + std::string(text) + "'");
}

void Scenario::validate() const {
  if (n_safety < 0 || n_ar < 0) throw std::invalid_argument("station counts must be >= 0");
  if (duration <= 0ns) throw std::invalid_argument("duration must be > 0");
  if (pcf_cfp_fraction <= 0.0 || pcf_cfp_fraction > 1.0) {
    throw std::invalid_argument("pcf_cfp_fraction must lie in (0, 1]");
  }
  if (edf_txop_limit <= 0ns) throw std::invalid_argument("EDF TXOP limit must be > 0");
  safety.validate();
  ar.validate();
}

}  // namespace iwsim::mac
