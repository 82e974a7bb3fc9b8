#pragma once

#include <chrono>
#include <cstdint>

namespace iwsim {

// Virtual simulation time. Integer nanoseconds keep tie-breaking exact.
using Duration = std::chrono::nanoseconds;
using SimTime = std::chrono::nanoseconds;

using namespace std::chrono_literals;

inline double to_ms(Duration d) { return static_cast<double>(d.count()) * 1e-6; }
inline double to_us(Duration d) { return static_cast<double>(d.count()) * 1e-3; }
inline double to_s(Duration d) { return static_cast<double>(d.count()) * 1e-9; }

inline Duration from_ms(double ms) {
  return Duration{static_cast<std::int64_t>(ms * 1e6 + (ms >= 0 ? 0.5 : -0.5))};
}
inline Duration from_us(double us) {
  return Duration{static_cast<std::int64_t>(us * 1e3 + (us >= 0 ? 0.5 : -0.5))};
}
inline Duration from_s(double s) {
  return Duration{static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5))};
}

}  // namespace iwsim
