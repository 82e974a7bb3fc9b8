#pragma once

#include "iwsim/mac/params.hpp"
#include "iwsim/mac/stats.hpp"

namespace iwsim::mac {

/// CSMA/CA with binary exponential backoff. Every MSDU draws a fresh backoff
/// uniformly from [0, CW] after the medium has been idle for DIFS; counters
/// freeze while the medium is busy; equal expiry slots collide.
LatencyStats run_dcf(const Scenario& scenario, const PhyParams& phy);

/// Point coordination: a beacon opens a contention-free period every
/// superframe (the smallest MSI). The AP polls stations cyclically and
/// class-blind; a polled station answers with one queued burst or a null
/// frame. CF-End follows a full round of null answers or the CFP limit, and
/// the next CFP resumes polling where this one stopped.
LatencyStats run_pcf(const Scenario& scenario, const PhyParams& phy);

/// HCF controlled channel access with either the reference scheduler (fixed
/// round-robin TXOP table per service interval) or EDF grants.
LatencyStats run_hcca(const Scenario& scenario, const PhyParams& phy,
                      SchedulerKind scheduler);

/// Dispatches on scenario.access (and scenario.scheduler for HCCA).
LatencyStats run_scenario(const Scenario& scenario, const PhyParams& phy);

}  // namespace iwsim::mac
