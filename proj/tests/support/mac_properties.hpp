#pragma once

// Randomized trace driver for the CSMA/CA transition functions.

#include <optional>
#include <string>

#include "wpansim/csma.hpp"

namespace wpansim::props {

struct PropertyStats {
  long traces = 0;
  long steps = 0;
  long successes = 0;
  long access_failures = 0;
  long retry_failures = 0;
  long deferrals = 0;
};

/// Drives `traces` random frames through unslotted_step or slotted_step with
/// random parameters and channel answers. Returns a description of the first
/// violated property, or nullopt.
///
/// Checked per frame: backoff rounds per CSMA run <= MaxNB + 1; CCAs per CSMA
/// run <= MaxNB + 1 (unslotted) or <= 2 (MaxNB + 1) between deferrals
/// (slotted); on-air transmissions <= MaxFrameRetries + 1; MinBE <= BE <=
/// MaxBE; CW in {0, 1, 2}; exactly one terminal outcome.
inline std::optional<std::string> check_mac_properties(bool slotted, long traces, std::uint64_t seed,
                                                       PropertyStats* stats = nullptr) {
  RngStream pick(seed);
  RngStream mac_rng(derive_seed(seed, 1));
  PropertyStats st;
  auto coin = [&](double p) { return pick.next_unit() < p; };
  auto fail = [&](long trace, const std::string& what) -> std::optional<std::string> {
    return "trace " + std::to_string(trace) + ": " + what;
  };

  for (long t = 0; t < traces; ++t) {
    CsmaParams p;
    p.max_be = static_cast<int>(pick.next_u64() % 9);
    p.min_be = static_cast<int>(pick.next_u64() % static_cast<std::uint64_t>(p.max_be + 1));
    p.max_nb = static_cast<int>(pick.next_u64() % 6);
    p.max_frame_retries = static_cast<int>(pick.next_u64() % 8);
    p.ack_enabled = coin(0.8);
    const double p_busy = pick.next_unit();
    const double p_ack_lost = pick.next_unit();

    auto ctx = [&] {
      SlotContext c;
      c.transaction = SimTime(188);
      c.cap_remaining = SimTime(coin(0.2) ? static_cast<std::int64_t>(pick.next_u64() % 200) - 10 : 5000);
      return c;
    };
    auto run_step = [&](const TxAttemptState& s, MacInput in) {
      return slotted ? slotted_step(s, in, p, ctx(), mac_rng) : unslotted_step(s, in, p, mac_rng);
    };

    StepResult r = run_step({}, MacInput::start_tx);
    int rounds = 1;
    int ccas = 0;
    int outcomes = 0;
    for (int guard = 0; guard < 100'000; ++guard) {
      ++st.steps;
      const auto& s = r.state;
      if (s.be < p.min_be || s.be > p.max_be) return fail(t, "BE out of [MinBE, MaxBE]");
      if (slotted && (s.cw < 0 || s.cw > 2)) return fail(t, "CW out of {0,1,2}");
      if (!slotted && s.cw != 0) return fail(t, "CW used in unslotted mode");
      if (s.transmissions > p.max_frame_retries + 1) return fail(t, "too many transmissions");
      if (rounds > p.max_nb + 1) return fail(t, "too many backoff rounds");
      const int cca_cap = slotted ? 2 * (p.max_nb + 1) : p.max_nb + 1;
      if (ccas > cca_cap) return fail(t, "too many CCAs in one CSMA run");

      MacInput next;
      switch (r.action.kind) {
        case ActionKind::wait: next = MacInput::backoff_expired; break;
        case ActionKind::do_cca:
          ++ccas;
          next = coin(p_busy) ? MacInput::cca_busy : MacInput::cca_idle;
          break;
        case ActionKind::transmit: next = MacInput::tx_done; break;
        case ActionKind::arm_ack_timeout:
          next = coin(p_ack_lost) ? MacInput::ack_timeout : MacInput::ack_received;
          break;
        case ActionKind::defer:
          ++st.deferrals;
          ccas = 0;
          next = MacInput::cap_resumed;
          break;
        case ActionKind::success:
        case ActionKind::fail:
          ++outcomes;
          if (r.action.kind == ActionKind::success) ++st.successes;
          else if (r.action.reason == FailReason::channel_access_failure) ++st.access_failures;
          else ++st.retry_failures;
          if (s.phase != MacPhase::done) return fail(t, "terminal action outside the done phase");
          goto finished;
      }
      const TxAttemptState before = r.state;
      r = run_step(r.state, next);
      if (r.action.kind == ActionKind::wait) {
        // A new round follows a busy CCA; a retry restarts the CSMA run.
        if (next == MacInput::ack_timeout) {
          rounds = 1;
          ccas = 0;
        } else if (next == MacInput::cca_busy) {
          ++rounds;
        }
      }
      if (next == MacInput::ack_timeout && r.state.retries != before.retries + 1)
        return fail(t, "ACK timeout did not consume a retry");
    }
    return fail(t, "frame never terminated");
  finished:
    if (outcomes != 1) return fail(t, "frame ended with " + std::to_string(outcomes) + " outcomes");
    // A finished attempt accepts only a new frame.
    for (MacInput in : {MacInput::backoff_expired, MacInput::cca_idle, MacInput::cca_busy, MacInput::tx_done,
                        MacInput::ack_received, MacInput::ack_timeout, MacInput::cap_resumed}) {
      try {
        run_step(r.state, in);
        return fail(t, std::string("done state accepted ") + to_string(in));
      } catch (const ProtocolViolation&) {
      }
    }
    ++st.traces;
  }
  if (stats) *stats = st;
  return std::nullopt;
}

}  // namespace wpansim::props
