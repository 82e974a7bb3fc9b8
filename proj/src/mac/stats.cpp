#include "iwsim/mac/stats.hpp"

#include <algorithm>

namespace iwsim::mac {

double ClassStats::miss_rate() const {
  const std::uint64_t settled = samples + dropped + overdue_in_queue;
  if (settled == 0) return 0.0;
  return static_cast<double>(deadline_misses) / static_cast<double>(settled);
}

void ClassAccumulator::on_delivered(Duration delay) {
  ++delivered_;
  sum_ms_ += static_cast<long double>(to_ms(delay));
  max_ = std::max(max_, delay);
  if (delay > msi_) ++misses_;
}

void ClassAccumulator::on_dropped() {
  ++dropped_;
  ++misses_;
}

void ClassAccumulator::on_pending_at_end(Duration age) {
  ++in_queue_;
  max_ = std::max(max_, age);
  if (age > msi_) {
    ++misses_;
    ++overdue_queued_;
  }
}

ClassStats ClassAccumulator::summary() const {
  ClassStats s;
  s.samples = delivered_;
  s.generated = generated_;
  s.dropped = dropped_;
  s.in_queue = in_queue_;
  s.overdue_in_queue = overdue_queued_;
  s.deadline_misses = misses_;
  s.mean_ms = delivered_ > 0 ? static_cast<double>(sum_ms_ / static_cast<long double>(delivered_)) : 0.0;
  s.max_ms = to_ms(max_);
  return s;
}

}  // namespace iwsim::mac
