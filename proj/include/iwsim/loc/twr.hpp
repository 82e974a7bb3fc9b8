#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

#include "iwsim/core/rng.hpp"

namespace iwsim::loc {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Anchor {
  int id = 0;
  Vec3 position = Vec3::Zero();
};

/// One two-way ranging exchange as seen by its two ends.
struct RangingExchange {
  double t_round = 0.0;  // s, measured by the initiator
  double t_reply = 0.0;  // s, measured by the responder
  int anchor_id = 0;
};

/// t_round < t_reply: the clocks disagree, the exchange is unusable.
class InvalidExchange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RangingNoise {
  double sigma_d = 0.0;  // m, per-distance Gaussian std
  double bias = 0.0;     // m

  void validate() const;
};

/// d = c * (t_round - t_reply) / 2.
double tof_from_twr(const RangingExchange& x);

/// t_reply = processing_delay; t_round adds the flight time both ways plus
/// twice the distance error (noise draw and bias) converted to time.
RangingExchange simulate_exchange(const Vec3& ms, const Anchor& anchor, const RangingNoise& noise,
                                  double processing_delay, Rng& rng);
RangingExchange simulate_exchange(const Vec3& ms, const Anchor& anchor, const RangingNoise& noise,
                                  double processing_delay, std::uint64_t seed);

}  // namespace iwsim::loc
