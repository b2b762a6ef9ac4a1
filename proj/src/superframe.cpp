#include "wpansim/superframe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wpansim {

namespace {

SimTime order_duration(int order, const char* what) {
  if (order < 0 || order > kMaxOrder)
    throw std::out_of_range(std::string(what) + " must be in [0, 14], got " + std::to_string(order));
  return PhyMacConstants{}.base_superframe_duration * (std::int64_t{1} << order);
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

void SuperframeConfig::validate() const {
  if (so < 0 || bo > kMaxOrder || so > bo)
    throw std::invalid_argument("superframe orders must satisfy 0 <= SO <= BO <= 14 (BO=" + std::to_string(bo) +
                                ", SO=" + std::to_string(so) + ")");
  if (beacon_mpdu <= 0) throw std::invalid_argument("beacon_mpdu must be positive");
}

SimTime beacon_interval(int bo) { return order_duration(bo, "BO"); }
SimTime superframe_duration(int so) { return order_duration(so, "SO"); }

double duty_cycle(int bo, int so) {
  SuperframeConfig{bo, so, 13}.validate();
  return std::ldexp(1.0, so - bo);
}

SuperframeSchedule SuperframeSchedule::make(const SuperframeConfig& cfg, const PhyMacConstants& c) {
  cfg.validate();
  SuperframeSchedule s;
  s.bi = c.base_superframe_duration * (std::int64_t{1} << cfg.bo);
  s.sd = c.base_superframe_duration * (std::int64_t{1} << cfg.so);
  s.slot_len = SimTime(s.sd.count() / kSlotsPerSuperframe);
  s.unit_backoff = c.unit_backoff_period;
  s.beacon_airtime = frame_airtime(cfg.beacon_mpdu, c);
  s.cap_start = s.unit_backoff * ceil_div(s.beacon_airtime.count(), s.unit_backoff.count());
  s.cap_end = s.sd;
  if (s.cap_end - s.cap_start < c.min_cap_length) throw std::invalid_argument("CAP shorter than aMinCAPLength");
  return s;
}

bool SuperframeSchedule::in_cap(SimTime t) const {
  const SimTime off = offset(t);
  return off >= cap_start && off < cap_end;
}

int SuperframeSchedule::slot_index(SimTime t) const {
  const SimTime off = offset(t);
  if (off >= sd) return -1;
  return static_cast<int>(off.count() / slot_len.count());
}

SimTime SuperframeSchedule::next_boundary_in_cap(SimTime t) const {
  const std::int64_t k = index(t);
  const SimTime base = start_of(k);
  const SimTime off = t - base;
  if (off <= cap_start) return base + cap_start;
  const SimTime aligned = unit_backoff * ceil_div(off.count(), unit_backoff.count());
  if (aligned < cap_end) return base + aligned;
  return start_of(k + 1) + cap_start;
}

SimTime SuperframeSchedule::countdown(SimTime from, std::int64_t periods) const {
  SimTime b = next_boundary_in_cap(from);
  for (;;) {
    const SimTime end = cap_end_at(b);
    const std::int64_t available = (end - b).count() / unit_backoff.count();
    if (periods < available) return b + unit_backoff * periods;
    periods -= available;
    b = start_of(index(b) + 1) + cap_start;
  }
}

}  // namespace wpansim
