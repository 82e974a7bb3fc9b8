#pragma once

#include <optional>
#include <span>
#include <vector>

#include "iwsim/core/time.hpp"
#include "iwsim/mac/params.hpp"

namespace iwsim::mac {

/// Traffic specification a station declares when it registers a flow.
struct FlowSpec {
  int station = 0;
  Duration msi{0};
  double mean_rate_bytes_per_s = 0.0;  // rho
  std::size_t nominal_msdu_bytes = 0;  // L
  std::size_t max_msdu_bytes = 0;      // M
};

FlowSpec flow_spec(int station, const TrafficClass& traffic);

struct TxopGrant {
  int station = 0;
  int msdus_per_si = 0;   // N = ceil(SI * rho / L)
  Duration txop{0};       // station airtime budget per SI
  Duration poll{0};       // poll frame + SIFS preceding the TXOP
};

/// Static polling table of the reference scheduler.
struct ScheduleTable {
  Duration service_interval{0};
  Duration budget{0};                 // SI minus the beacon reservation
  std::vector<TxopGrant> admitted;    // polled in this order every SI
  std::vector<int> rejected;          // stations whose TXOP did not fit

  Duration allocated() const;
  bool admission_failed() const { return !rejected.empty(); }
};

/// Largest submultiple of `beacon_interval` that does not exceed `min_msi`.
Duration service_interval(Duration beacon_interval, Duration min_msi);

/// Airtime of one polled MSDU exchange: DATA + SIFS + ACK + SIFS.
Duration msdu_exchange(const PhyParams& phy, std::size_t bytes);

/// Builds the reference schedule. SI is computed from the smallest MSI;
/// TXOP_i = max(N_i * exchange(L_i), exchange(M_i)). Flows are admitted in
/// the given (registration) order while the accumulated poll + TXOP time fits
/// the SI budget; the others are listed as rejected.
ScheduleTable reference_scheduler(std::span<const FlowSpec> flows, const PhyParams& phy,
                                  Duration beacon_interval);

/// One registered flow as seen by the EDF scheduler.
struct EdfCandidate {
  int station = 0;
  SimTime deadline{0};  // last service time + MSI
};

/// Earliest deadline first; equal deadlines go to the lower station id.
/// Returns the index into `pending`, or nullopt if it is empty.
std::optional<std::size_t> edf_select(std::span<const EdfCandidate> pending);

/// EDF admission: a flow is admitted while the summed density
/// C_i / min(period_i, msi_i) plus the beacon share stays <= 1, where C_i is
/// the airtime to poll and deliver one burst.
struct EdfAdmission {
  std::vector<int> admitted;
  std::vector<int> rejected;
  double utilization = 0.0;
};
EdfAdmission edf_admission(std::span<const int> stations,
                           std::span<const TrafficClass> traffic, const PhyParams& phy);

}  // namespace iwsim::mac
