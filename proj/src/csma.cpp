#include "wpansim/csma.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wpansim {

void CsmaParams::validate() const {
  if (min_be < 0 || max_be < min_be || max_be > 8)
    throw std::invalid_argument("backoff exponents must satisfy 0 <= MinBE <= MaxBE <= 8");
  if (max_nb < 0 || max_nb > 5) throw std::invalid_argument("MaxNB must be in [0, 5]");
  if (max_frame_retries < 0 || max_frame_retries > 7)
    throw std::invalid_argument("MaxFrameRetries must be in [0, 7]");
}

namespace {

[[noreturn]] void violation(const TxAttemptState& s, MacInput in) {
  throw ProtocolViolation(std::string("input ") + to_string(in) + " is undefined in phase " + to_string(s.phase));
}

MacAction draw_backoff(const TxAttemptState& s, RngStream& rng) { return MacAction::wait(rng.uniform_units(s.be)); }

// Shared by both variants: fresh CSMA run (new frame or retransmission).
void restart_csma(TxAttemptState& s, const CsmaParams& p) {
  s.nb = 0;
  s.be = p.min_be;
  s.cw = kInitialContentionWindow;
  s.ccas_this_run = 0;
  s.phase = MacPhase::backoff;
}

// Busy channel: NB and BE grow, CW resets. Returns the next action.
MacAction on_busy(TxAttemptState& s, const CsmaParams& p, RngStream& rng) {
  ++s.ccas_this_run;
  s.cw = kInitialContentionWindow;
  ++s.nb;
  s.be = std::min(s.be + 1, p.max_be);
  if (s.nb > p.max_nb) {
    s.phase = MacPhase::done;
    return MacAction::fail(FailReason::channel_access_failure);
  }
  s.phase = MacPhase::backoff;
  return draw_backoff(s, rng);
}

// Transmission and acknowledgement handling, identical in both variants.
std::optional<StepResult> after_transmit(TxAttemptState s, MacInput in, const CsmaParams& p, RngStream& rng) {
  if (s.phase == MacPhase::transmitting && in == MacInput::tx_done) {
    if (!p.ack_enabled) {
      s.phase = MacPhase::done;
      return StepResult{s, MacAction::simple(ActionKind::success)};
    }
    s.phase = MacPhase::awaiting_ack;
    return StepResult{s, MacAction{ActionKind::arm_ack_timeout, 0, kMacAckWaitDuration, {}}};
  }
  if (s.phase == MacPhase::awaiting_ack && in == MacInput::ack_received) {
    s.phase = MacPhase::done;
    return StepResult{s, MacAction::simple(ActionKind::success)};
  }
  if (s.phase == MacPhase::awaiting_ack && in == MacInput::ack_timeout) {
    ++s.retries;
    if (s.retries > p.max_frame_retries) {
      s.phase = MacPhase::done;
      return StepResult{s, MacAction::fail(FailReason::retry_exhausted)};
    }
    restart_csma(s, p);
    return StepResult{s, draw_backoff(s, rng)};
  }
  return std::nullopt;
}

bool can_start(const TxAttemptState& s) { return s.phase == MacPhase::idle || s.phase == MacPhase::done; }

TxAttemptState fresh_attempt(const CsmaParams& p) {
  TxAttemptState s;
  restart_csma(s, p);
  return s;
}

}  // namespace

StepResult unslotted_step(const TxAttemptState& state, MacInput input, const CsmaParams& params, RngStream& rng) {
  TxAttemptState s = state;
  switch (input) {
    case MacInput::start_tx: {
      if (!can_start(s)) violation(s, input);
      s = fresh_attempt(params);
      s.cw = 0;
      return {s, draw_backoff(s, rng)};
    }
    case MacInput::backoff_expired:
      if (s.phase != MacPhase::backoff) violation(s, input);
      s.phase = MacPhase::cca;
      return {s, MacAction::simple(ActionKind::do_cca)};
    case MacInput::cca_busy: {
      if (s.phase != MacPhase::cca) violation(s, input);
      auto action = on_busy(s, params, rng);
      s.cw = 0;
      return {s, action};
    }
    case MacInput::cca_idle:
      if (s.phase != MacPhase::cca) violation(s, input);
      ++s.ccas_this_run;
      ++s.transmissions;
      s.phase = MacPhase::transmitting;
      return {s, MacAction::simple(ActionKind::transmit)};
    case MacInput::tx_done:
    case MacInput::ack_received:
    case MacInput::ack_timeout: {
      auto r = after_transmit(s, input, params, rng);
      if (!r) violation(s, input);
      r->state.cw = 0;
      return *r;
    }
    case MacInput::cap_resumed:
      break;
  }
  violation(s, input);
}

StepResult slotted_step(const TxAttemptState& state, MacInput input, const CsmaParams& params,
                        const SlotContext& ctx, RngStream& rng) {
  TxAttemptState s = state;
  switch (input) {
    case MacInput::start_tx: {
      if (!can_start(s)) violation(s, input);
      s = fresh_attempt(params);
      return {s, draw_backoff(s, rng)};
    }
    case MacInput::backoff_expired:
      if (s.phase != MacPhase::backoff) violation(s, input);
      s.phase = MacPhase::cca;
      return {s, MacAction::simple(ActionKind::do_cca)};
    case MacInput::cca_busy: {
      if (s.phase != MacPhase::cca) violation(s, input);
      auto action = on_busy(s, params, rng);
      return {s, action};
    }
    case MacInput::cca_idle: {
      if (s.phase != MacPhase::cca) violation(s, input);
      ++s.ccas_this_run;
      --s.cw;
      const bool fits = s.cw > 0 ? ctx.cap_remaining > SimTime::zero() : ctx.cap_remaining >= ctx.transaction;
      if (!fits) {
        // Not enough CAP left: wait for the next CAP and redo both CCAs.
        s.cw = kInitialContentionWindow;
        s.phase = MacPhase::deferred;
        return {s, MacAction::simple(ActionKind::defer)};
      }
      if (s.cw > 0) return {s, MacAction::simple(ActionKind::do_cca)};
      ++s.transmissions;
      s.phase = MacPhase::transmitting;
      return {s, MacAction::simple(ActionKind::transmit)};
    }
    case MacInput::cap_resumed:
      if (s.phase != MacPhase::deferred) violation(s, input);
      s.cw = kInitialContentionWindow;
      s.phase = MacPhase::cca;
      return {s, MacAction::simple(ActionKind::do_cca)};
    case MacInput::tx_done:
    case MacInput::ack_received:
    case MacInput::ack_timeout: {
      auto r = after_transmit(s, input, params, rng);
      if (!r) violation(s, input);
      return *r;
    }
  }
  violation(s, input);
}

bool MacQueue::offer(const Frame& f) {
  if (pending_.size() >= capacity_) return false;
  pending_.push_back(f);
  return true;
}

std::optional<Frame> MacQueue::pop() {
  if (pending_.empty()) return std::nullopt;
  Frame f = pending_.front();
  pending_.pop_front();
  return f;
}

std::optional<AckPlan> ack_respond(NodeId coordinator, const TxOutcome& data, bool ack_enabled,
                                   const PhyMacConstants& c) {
  if (!ack_enabled || !data.delivered || data.frame.kind != FrameKind::data || data.frame.dst != coordinator)
    return std::nullopt;
  AckPlan plan;
  plan.frame = Frame::ack(coordinator, data.frame.src, data.frame.seq, c);
  plan.start = data.end + c.turnaround;
  plan.end = plan.start + frame_airtime(plan.frame.mpdu_len, c);
  return plan;
}

SimTime transaction_time(int mpdu_len, bool ack_enabled, const PhyMacConstants& c) {
  SimTime t = frame_airtime(mpdu_len, c);
  if (ack_enabled) t += c.turnaround + frame_airtime(c.ack_mpdu, c);
  return t;
}

const char* to_string(MacPhase p) {
  switch (p) {
    case MacPhase::idle: return "idle";
    case MacPhase::backoff: return "backoff";
    case MacPhase::cca: return "cca";
    case MacPhase::deferred: return "deferred";
    case MacPhase::transmitting: return "transmitting";
    case MacPhase::awaiting_ack: return "awaiting_ack";
    case MacPhase::done: return "done";
  }
  return "?";
}

const char* to_string(MacInput i) {
  switch (i) {
    case MacInput::start_tx: return "start_tx";
    case MacInput::backoff_expired: return "backoff_expired";
    case MacInput::cca_idle: return "cca_idle";
    case MacInput::cca_busy: return "cca_busy";
    case MacInput::tx_done: return "tx_done";
    case MacInput::ack_received: return "ack_received";
    case MacInput::ack_timeout: return "ack_timeout";
    case MacInput::cap_resumed: return "cap_resumed";
  }
  return "?";
}

const char* to_string(ActionKind a) {
  switch (a) {
    case ActionKind::wait: return "wait";
    case ActionKind::do_cca: return "do_cca";
    case ActionKind::transmit: return "transmit";
    case ActionKind::arm_ack_timeout: return "arm_ack_timeout";
    case ActionKind::defer: return "defer";
    case ActionKind::success: return "success";
    case ActionKind::fail: return "fail";
  }
  return "?";
}

const char* to_string(FailReason r) {
  switch (r) {
    case FailReason::channel_access_failure: return "channel_access_failure";
    case FailReason::retry_exhausted: return "retry_exhausted";
  }
  return "?";
}

}  // namespace wpansim
