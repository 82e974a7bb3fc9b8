#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "iwsim/core/simulator.hpp"
#include "iwsim/loc/trilateration.hpp"

namespace iwsim::loc {

/// Fewer than 4 anchors answered during a localization round.
class InsufficientRanging : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  RangingNoise noise;
  double processing_delay_s = 100e-6;  // responder turnaround (t_reply)
  double frame_airtime_s = 20e-6;      // response frame on the medium
  double timeout_s = 1e-3;             // wait for a response that never comes
  SolverOptions solver;
};

/// Timing of one exchange on the shared medium.
struct ExchangeRecord {
  int anchor_id = 0;
  SimTime start{0};
  SimTime end{0};
  bool answered = false;
  double distance = 0.0;
};

struct Fix {
  int ms_id = 0;
  SimTime timestamp{0};  // end of the round
  SimTime round_start{0};
  PositionEstimate estimate;
  std::vector<ExchangeRecord> exchanges;
};

/// Localization server: for each request it runs one TWR exchange per
/// registered anchor, strictly one after another on the virtual medium, then
/// trilaterates. Exchange durations are t_round plus the response airtime,
/// or the timeout for an anchor that does not answer.
class LocalizationServer {
 public:
  LocalizationServer(Simulator& sim, ServerConfig config, std::uint64_t seed);

  /// Throws std::invalid_argument on a duplicate id.
  void register_anchor(const Anchor& anchor);
  const std::vector<Anchor>& anchors() const { return anchors_; }
  /// Marks an anchor as silent (simulated loss) or back online.
  void set_reachable(int anchor_id, bool reachable);

  /// Runs one round for the MS at `true_position` starting at the current
  /// simulation time. Throws InsufficientRanging below 4 answers (the failed
  /// round still consumes medium time).
  const Fix& locate(int ms_id, const Vec3& true_position);

  const std::map<std::pair<int, std::int64_t>, Fix>& results() const { return results_; }

 private:
  void start_exchange(std::size_t index);

  Simulator& sim_;
  ServerConfig config_;
  Rng rng_;
  std::vector<Anchor> anchors_;
  std::set<int> silent_;
  std::map<std::pair<int, std::int64_t>, Fix> results_;

  // State of the round in progress.
  Vec3 target_ = Vec3::Zero();
  Fix current_;
  bool round_done_ = false;
};

}  // namespace iwsim::loc
