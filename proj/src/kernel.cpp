#include "wpansim/kernel.hpp"

namespace wpansim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::arrival: return "arrival";
    case EventKind::backoff_expired: return "backoff-expired";
    case EventKind::cca_result: return "cca-result";
    case EventKind::tx_start: return "tx-start";
    case EventKind::tx_end: return "tx-end";
    case EventKind::ack_timeout: return "ack-timeout";
    case EventKind::ack_start: return "ack-start";
    case EventKind::beacon: return "beacon";
    case EventKind::cap_end: return "cap-end";
    case EventKind::superframe_start: return "superframe-start";
    case EventKind::custom: return "custom";
  }
  return "?";
}

EventHandle Kernel::schedule(SimTime at, EventKind kind, NodeId target, std::uint64_t payload) {
  if (at < now_) {
    throw std::logic_error("event scheduled in the past: at " + std::to_string(at.count()) +
                           " < now " + std::to_string(now_.count()));
  }
  const std::uint64_t seq = next_seq_++;
  slots_.push_back(Slot::pending);
  queue_.push(Event{at, seq, kind, target, payload});
  ++live_;
  return EventHandle{seq};
}

bool Kernel::cancel(EventHandle h) {
  if (!is_pending(h)) return false;
  slots_[h.sequence] = Slot::cancelled;
  --live_;
  return true;
}

bool Kernel::is_pending(EventHandle h) const {
  return h.sequence < slots_.size() && slots_[h.sequence] == Slot::pending;
}

const Event* Kernel::peek_live() {
  while (!queue_.empty() && slots_[queue_.top().sequence] != Slot::pending) queue_.pop();
  return queue_.empty() ? nullptr : &queue_.top();
}

bool Kernel::pop_live(Event& out) {
  if (peek_live() == nullptr) return false;
  out = queue_.top();
  queue_.pop();
  slots_[out.sequence] = Slot::fired;
  --live_;
  return true;
}

}  // namespace wpansim
