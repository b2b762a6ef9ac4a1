#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpansim/sim_time.hpp"

namespace wpansim {

using NodeId = std::uint32_t;

enum class EventKind : std::uint8_t {
  arrival,
  backoff_expired,
  cca_result,
  tx_start,
  tx_end,
  ack_timeout,
  ack_start,
  beacon,
  cap_end,
  superframe_start,
  custom,
};

const char* to_string(EventKind kind);

struct Event {
  SimTime fire_time;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::custom;
  NodeId target = 0;
  std::uint64_t payload = 0;
};

struct EventHandle {
  std::uint64_t sequence = ~std::uint64_t{0};
  bool valid() const { return sequence != ~std::uint64_t{0}; }
  friend bool operator==(EventHandle, EventHandle) = default;
};

/// Thrown when a run cannot make progress or an event is misused.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StopCondition {
  /// Events strictly before the limit are processed; the clock then jumps to it.
  std::optional<SimTime> time_limit;
  /// Checked after every event; the run ends as soon as it returns true.
  std::function<bool()> done;

  static StopCondition at_time(SimTime limit) { return {limit, {}}; }
  static StopCondition when(std::function<bool()> pred) { return {std::nullopt, std::move(pred)}; }
};

enum class RunStatus { completed, starved };

struct SimSummary {
  RunStatus status = RunStatus::completed;
  SimTime final_time;
  std::uint64_t events_processed = 0;
};

/// Discrete-event engine: a monotone clock and an event queue ordered by
/// (fire_time, insertion sequence).
class Kernel {
 public:
  SimTime now() const { return now_; }

  /// Schedules an event. Scheduling before now() throws std::logic_error.
  EventHandle schedule(SimTime at, EventKind kind, NodeId target, std::uint64_t payload = 0);
  EventHandle schedule_in(SimTime delay, EventKind kind, NodeId target, std::uint64_t payload = 0) {
    return schedule(now_ + delay, kind, target, payload);
  }

  /// True iff the event was pending and will now never fire.
  bool cancel(EventHandle h);
  bool is_pending(EventHandle h) const;

  std::size_t pending_count() const { return live_; }

  /// Called for every processed event, before the handler.
  void set_observer(std::function<void(const Event&)> obs) { observer_ = std::move(obs); }

  template <typename Handler>
  SimSummary run(const StopCondition& stop, Handler&& handler);

 private:
  enum class Slot : std::uint8_t { pending, fired, cancelled };

  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  bool pop_live(Event& out);
  const Event* peek_live();

  SimTime now_;
  std::uint64_t next_seq_ = 0;
  std::size_t live_ = 0;
  std::vector<Slot> slots_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::function<void(const Event&)> observer_;
};

template <typename Handler>
SimSummary Kernel::run(const StopCondition& stop, Handler&& handler) {
  SimSummary summary;
  auto finished = [&] { return stop.done && stop.done(); };
  if (finished()) {
    summary.final_time = now_;
    return summary;
  }
  for (;;) {
    const Event* next = peek_live();
    if (stop.time_limit && (next == nullptr || next->fire_time >= *stop.time_limit)) {
      if (now_ < *stop.time_limit) now_ = *stop.time_limit;
      break;
    }
    if (next == nullptr) {
      summary.status = RunStatus::starved;
      break;
    }
    Event ev;
    pop_live(ev);
    now_ = ev.fire_time;
    ++summary.events_processed;
    if (observer_) observer_(ev);
    handler(ev);
    if (finished()) break;
  }
  summary.final_time = now_;
  return summary;
}

}  // namespace wpansim
