#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "iwsim/core/time.hpp"

namespace iwsim {

/// Thrown when a caller violates an engine precondition (e.g. scheduling in
/// the past). The engine never clamps.
class ScheduleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Event {
  SimTime time{0};
  std::uint64_t seq = 0;     // insertion counter, breaks time ties
  std::uint32_t kind = 0;    // opaque payload tag
  std::uint32_t target = 0;  // entity id
};

/// Returned by schedule(); cancels the event it names.
struct EventHandle {
  std::uint64_t seq = UINT64_MAX;
  bool valid() const { return seq != UINT64_MAX; }
};

/// Discrete-event engine: virtual clock plus a time-ordered event queue.
///
/// Events dequeue by (time, seq). The clock only moves forward, and only when
/// an event is dequeued or when run_until() reaches its horizon.
class Simulator {
 public:
  using Handler = std::function<void()>;

  SimTime now() const { return now_; }

  EventHandle schedule(SimTime at, std::uint32_t kind, std::uint32_t target,
                       Handler handler);
  EventHandle schedule_in(Duration delay, std::uint32_t kind,
                          std::uint32_t target, Handler handler) {
    return schedule(now_ + delay, kind, target, std::move(handler));
  }

  /// Returns false when the handle already fired, was cancelled, or is
  /// invalid.
  bool cancel(EventHandle handle);

  /// Processes every pending event with time <= t_end, then sets now = t_end.
  std::size_t run_until(SimTime t_end);

  /// Processes exactly one event if any remains. Returns false on empty queue.
  bool step();

  std::size_t pending() const { return queue_.size() - cancelled_.size(); }
  std::uint64_t processed() const { return processed_; }

  /// Writes `time_ns\tseq\tkind\ttarget` for each processed event.
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  struct Entry {
    Event event;
    Handler handler;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.event.time != b.event.time) return a.event.time > b.event.time;
      return a.event.seq > b.event.seq;
    }
  };

  bool pop_live(Entry& out);
  void fire(Entry& entry);

  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<std::uint64_t> live_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::ostream* trace_ = nullptr;
};

}  // namespace iwsim
