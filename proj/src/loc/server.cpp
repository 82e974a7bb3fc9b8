#include "iwsim/loc/server.hpp"

#include <cmath>
#include <string>

namespace iwsim::loc {

namespace {
constexpr std::uint32_t kExchangeStart = 1;
constexpr std::uint32_t kExchangeEnd = 2;

Duration seconds(double s) { return Duration{static_cast<std::int64_t>(std::llround(s * 1e9))}; }
}  // namespace

LocalizationServer::LocalizationServer(Simulator& sim, ServerConfig config, std::uint64_t seed)
    : sim_(sim), config_(std::move(config)), rng_(seed) {
  config_.noise.validate();
}

void LocalizationServer::register_anchor(const Anchor& anchor) {
  for (const Anchor& a : anchors_) {
    if (a.id == anchor.id) throw std::invalid_argument("anchor id " + std::to_string(anchor.id) + " already registered");
  }
  anchors_.push_back(anchor);
}

void LocalizationServer::set_reachable(int anchor_id, bool reachable) {
  if (reachable) {
    silent_.erase(anchor_id);
  } else {
    silent_.insert(anchor_id);
  }
}

const Fix& LocalizationServer::locate(int ms_id, const Vec3& true_position) {
  if (anchors_.size() < 4) {
    throw InsufficientRanging("insufficient ranging: only " + std::to_string(anchors_.size()) +
                              " anchors registered, 4 needed");
  }
  target_ = true_position;
  current_ = Fix{};
  current_.ms_id = ms_id;
  current_.round_start = sim_.now();
  round_done_ = false;
  start_exchange(0);
  while (!round_done_ && sim_.step()) {
  }
  current_.timestamp = sim_.now();

  std::vector<RangeMeasurement> ms;
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const ExchangeRecord& x = current_.exchanges[i];
    if (x.answered) ms.push_back(RangeMeasurement{anchors_[i], x.distance});
  }
  if (ms.size() < 4) {
    throw InsufficientRanging("insufficient ranging: " + std::to_string(ms.size()) +
                              " of " + std::to_string(anchors_.size()) + " anchors answered, 4 needed");
  }
  current_.estimate = trilaterate(ms, std::nullopt, config_.solver);
  const auto key = std::make_pair(ms_id, current_.timestamp.count());
  results_[key] = current_;
  return results_[key];
}

void LocalizationServer::start_exchange(std::size_t index) {
  if (index == anchors_.size()) {
    round_done_ = true;
    return;
  }
  const Anchor& a = anchors_[index];
  sim_.schedule(sim_.now(), kExchangeStart, static_cast<std::uint32_t>(a.id), [this, index] {
    const Anchor& anchor = anchors_[index];
    ExchangeRecord rec;
    rec.anchor_id = anchor.id;
    rec.start = sim_.now();
    Duration busy;
    if (silent_.count(anchor.id) > 0) {
      busy = seconds(config_.timeout_s);
    } else {
      const RangingExchange x = simulate_exchange(target_, anchor, config_.noise,
                                                  config_.processing_delay_s, rng_);
      try {
        rec.distance = tof_from_twr(x);
        rec.answered = true;
      } catch (const InvalidExchange&) {
        rec.answered = false;  // discarded, the medium time is spent anyway
      }
      busy = seconds(std::max(x.t_round, x.t_reply) + config_.frame_airtime_s);
    }
    rec.end = sim_.now() + busy;
    current_.exchanges.push_back(rec);
    sim_.schedule(rec.end, kExchangeEnd, static_cast<std::uint32_t>(anchor.id),
                  [this, index] { start_exchange(index + 1); });
  });
}

}  // namespace iwsim::loc
