#pragma once

#include <cstdint>

#include "wpansim/phy.hpp"
#include "wpansim/sim_time.hpp"

namespace wpansim {

inline constexpr int kMaxOrder = 14;
inline constexpr int kSlotsPerSuperframe = 16;

struct SuperframeConfig {
  int bo = 7;
  int so = 6;
  int beacon_mpdu = 13;

  /// Throws std::invalid_argument unless 0 <= SO <= BO <= 14.
  void validate() const;
  friend bool operator==(const SuperframeConfig&, const SuperframeConfig&) = default;
};

/// aBaseSuperframeDuration * 2^BO. Throws std::out_of_range for BO outside [0, 14].
SimTime beacon_interval(int bo);
/// aBaseSuperframeDuration * 2^SO. Throws std::out_of_range for SO outside [0, 14].
SimTime superframe_duration(int so);
/// SD / BI = 2^(SO - BO), exact in binary floating point.
double duty_cycle(int bo, int so);

enum class Gate : std::uint8_t { awake, asleep };

/// Superframe timing relative to each beacon, plus absolute-time helpers.
///
/// The CAP runs from the end of the beacon, rounded up to a backoff-period
/// boundary, to SD. There is no CFP. Backoff boundaries are multiples of
/// aUnitBackoffPeriod counted from the beacon start.
struct SuperframeSchedule {
  SimTime bi;
  SimTime sd;
  SimTime slot_len;
  SimTime beacon_airtime;
  SimTime cap_start;
  SimTime cap_end;
  SimTime unit_backoff;

  static SuperframeSchedule make(const SuperframeConfig& cfg, const PhyMacConstants& c = {});

  std::int64_t index(SimTime t) const { return t.count() / bi.count(); }
  SimTime start_of(std::int64_t k) const { return bi * k; }
  SimTime offset(SimTime t) const { return SimTime(t.count() % bi.count()); }

  bool in_cap(SimTime t) const;
  /// Asleep iff t mod BI lies in [SD, BI).
  Gate gate(SimTime t) const { return offset(t) >= sd ? Gate::asleep : Gate::awake; }
  int slot_index(SimTime t) const;

  /// Absolute end of the CAP that contains t (or of the CAP of t's superframe).
  SimTime cap_end_at(SimTime t) const { return start_of(index(t)) + cap_end; }
  /// Earliest backoff boundary >= t that lies inside a CAP.
  SimTime next_boundary_in_cap(SimTime t) const;
  /// Boundary at which a backoff of `periods` started at boundary `from`
  /// expires, counting periods only inside CAPs.
  SimTime countdown(SimTime from, std::int64_t periods) const;
};

inline Gate inactive_period_gate(const SuperframeSchedule& s, SimTime t) { return s.gate(t); }

}  // namespace wpansim
