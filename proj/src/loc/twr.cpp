#include "iwsim/loc/twr.hpp"

#include <string>

namespace iwsim::loc {

void RangingNoise::validate() const {
  if (!(sigma_d >= 0.0)) throw std::invalid_argument("sigma_d must be non-negative");
}

double tof_from_twr(const RangingExchange& x) {
  if (x.t_round < x.t_reply) {
    throw InvalidExchange("invalid exchange with anchor " + std::to_string(x.anchor_id) +
                          ": t_round " + std::to_string(x.t_round) + " s < t_reply " +
                          std::to_string(x.t_reply) + " s");
  }
  return kSpeedOfLight * (x.t_round - x.t_reply) / 2.0;
}

RangingExchange simulate_exchange(const Vec3& ms, const Anchor& anchor, const RangingNoise& noise,
                                  double processing_delay, Rng& rng) {
  noise.validate();
  if (!(processing_delay >= 0.0)) throw std::invalid_argument("processing delay must be >= 0");
  const double d = (ms - anchor.position).norm();
  const double err = noise.sigma_d > 0.0 ? noise.sigma_d * rng.normal() : 0.0;
  RangingExchange x;
  x.anchor_id = anchor.id;
  x.t_reply = processing_delay;
  x.t_round = 2.0 * d / kSpeedOfLight + processing_delay + 2.0 * err / kSpeedOfLight +
              2.0 * noise.bias / kSpeedOfLight;
  return x;
}

RangingExchange simulate_exchange(const Vec3& ms, const Anchor& anchor, const RangingNoise& noise,
                                  double processing_delay, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_exchange(ms, anchor, noise, processing_delay, rng);
}

}  // namespace iwsim::loc
