#include "iwsim/core/simulator.hpp"

#include <ostream>
#include <string>

namespace iwsim {

EventHandle Simulator::schedule(SimTime at, std::uint32_t kind,
                                std::uint32_t target, Handler handler) {
  if (at < now_) {
    throw ScheduleError("event scheduled in the past: t=" +
                        std::to_string(at.count()) +
                        " ns < now=" + std::to_string(now_.count()) + " ns");
  }
  const std::uint64_t seq = next_seq_++;
  queue_.push(Entry{Event{at, seq, kind, target}, std::move(handler)});
  live_.insert(seq);
  return EventHandle{seq};
}

bool Simulator::cancel(EventHandle handle) {
  if (!handle.valid() || live_.erase(handle.seq) == 0) return false;
  cancelled_.insert(handle.seq);
  return true;
}

bool Simulator::pop_live(Entry& out) {
  while (!queue_.empty()) {
    // priority_queue::top is const; the handler is moved out before pop.
    Entry& top = const_cast<Entry&>(queue_.top());
    if (cancelled_.erase(top.event.seq) > 0) {
      queue_.pop();
      continue;
    }
    out = std::move(top);
    queue_.pop();
    return true;
  }
  return false;
}

void Simulator::fire(Entry& entry) {
  live_.erase(entry.event.seq);
  now_ = entry.event.time;
  ++processed_;
  if (trace_ != nullptr) {
    *trace_ << entry.event.time.count() << '\t' << entry.event.seq << '\t'
            << entry.event.kind << '\t' << entry.event.target << '\n';
  }
  if (entry.handler) entry.handler();
}

std::size_t Simulator::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw ScheduleError("run_until horizon lies in the past");
  }
  std::size_t count = 0;
  while (!queue_.empty()) {
    // Skip cancelled heads so the time check below sees a live event.
    const Entry& top = queue_.top();
    if (cancelled_.count(top.event.seq) > 0) {
      cancelled_.erase(top.event.seq);
      queue_.pop();
      continue;
    }
    if (top.event.time > t_end) break;
    Entry entry;
    pop_live(entry);
    fire(entry);
    ++count;
  }
  now_ = t_end;
  return count;
}

bool Simulator::step() {
  Entry entry;
  if (!pop_live(entry)) return false;
  fire(entry);
  return true;
}

}  // namespace iwsim
