#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "wpansim/phy.hpp"
#include "wpansim/rng.hpp"
#include "wpansim/sim_time.hpp"

namespace wpansim {

inline constexpr SimTime kUnitBackoffPeriod{20};
inline constexpr SimTime kMacAckWaitDuration{54};
inline constexpr int kInitialContentionWindow = 2;

struct CsmaParams {
  int min_be = 3;
  int max_be = 5;
  int max_nb = 4;
  int max_frame_retries = 3;
  bool ack_enabled = true;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  friend bool operator==(const CsmaParams&, const CsmaParams&) = default;
};

enum class MacPhase : std::uint8_t { idle, backoff, cca, deferred, transmitting, awaiting_ack, done };

enum class MacInput : std::uint8_t {
  start_tx,
  backoff_expired,
  cca_idle,
  cca_busy,
  tx_done,
  ack_received,
  ack_timeout,
  cap_resumed,  // slotted only: a deferred attempt reached the next CAP
};

enum class FailReason : std::uint8_t { channel_access_failure, retry_exhausted };

/// Live counters of one frame's delivery attempt.
struct TxAttemptState {
  int nb = 0;
  int be = 0;
  int cw = 0;  // slotted only
  int retries = 0;
  MacPhase phase = MacPhase::idle;
  int ccas_this_run = 0;  // CCAs since the last CSMA (re)start
  int transmissions = 0;  // on-air data transmissions of this frame
  friend bool operator==(const TxAttemptState&, const TxAttemptState&) = default;
};

enum class ActionKind : std::uint8_t { wait, do_cca, transmit, arm_ack_timeout, defer, success, fail };

struct MacAction {
  ActionKind kind = ActionKind::wait;
  std::int64_t periods = 0;  // wait: random backoff in unit backoff periods
  SimTime duration;  // wait: periods * aUnitBackoffPeriod; arm_ack_timeout: timeout
  FailReason reason = FailReason::channel_access_failure;

  static MacAction wait(std::int64_t periods) {
    return {ActionKind::wait, periods, kUnitBackoffPeriod * periods, {}};
  }
  static MacAction simple(ActionKind k) { return {k, 0, {}, {}}; }
  static MacAction fail(FailReason r) { return {ActionKind::fail, 0, {}, r}; }
};

struct StepResult {
  TxAttemptState state;
  MacAction action;
};

/// Unslotted CSMA/CA with acknowledgement and retransmission.
///
/// A channel-access failure ends the frame without consuming a retry; only
/// ACK timeouts count as retries. Undefined (phase, input) pairs throw
/// ProtocolViolation.
StepResult unslotted_step(const TxAttemptState& state, MacInput input, const CsmaParams& params, RngStream& rng);

/// What the slotted variant needs to know about the current CAP.
struct SlotContext {
  /// CAP time left from the next backoff boundary (where the next CCA or the
  /// transmission would begin) to the end of the CAP. <= 0 once that
  /// boundary lies outside the CAP.
  SimTime cap_remaining;
  /// Frame airtime + turnaround + ACK airtime (just the frame without ACKs).
  SimTime transaction;
};

/// Slotted CSMA/CA of the beacon-enabled mode. The driver aligns each action
/// to the backoff-period grid and counts backoff periods only inside the CAP.
StepResult slotted_step(const TxAttemptState& state, MacInput input, const CsmaParams& params,
                        const SlotContext& ctx, RngStream& rng);

/// Bounded FIFO of frames waiting behind the one in service. Arrivals beyond
/// capacity are refused (drop-new).
class MacQueue {
 public:
  explicit MacQueue(std::size_t capacity = 1) : capacity_(capacity) {}

  /// False when the queue is full; the caller drops the frame.
  bool offer(const Frame& f);
  std::optional<Frame> pop();

  std::size_t size() const { return pending_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return pending_.empty(); }
  const std::deque<Frame>& contents() const { return pending_; }

 private:
  std::size_t capacity_;
  std::deque<Frame> pending_;
};

/// ACK sent by the coordinator in reply to an intact data frame, without
/// CSMA, one turnaround time after the data frame ends.
struct AckPlan {
  SimTime start;
  SimTime end;
  Frame frame;
};

std::optional<AckPlan> ack_respond(NodeId coordinator, const TxOutcome& data, bool ack_enabled,
                                   const PhyMacConstants& c = {});

/// Time from the start of a data frame to the end of its ACK.
SimTime transaction_time(int mpdu_len, bool ack_enabled, const PhyMacConstants& c = {});

const char* to_string(MacPhase p);
const char* to_string(MacInput i);
const char* to_string(ActionKind a);
const char* to_string(FailReason r);

}  // namespace wpansim
