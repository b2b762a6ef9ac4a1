#include <gtest/gtest.h>

#include <set>

#include "wpansim/csma.hpp"

using namespace wpansim;

namespace {

StepResult step(const TxAttemptState& s, MacInput in, const CsmaParams& p, RngStream& rng) {
  return unslotted_step(s, in, p, rng);
}

SlotContext roomy() { return {SimTime(10'000), SimTime(188)}; }

}  // namespace

TEST(CsmaParams, Ranges) {
  EXPECT_NO_THROW(CsmaParams{}.validate());
  EXPECT_NO_THROW((CsmaParams{0, 0, 0, 0, true}.validate()));
  EXPECT_NO_THROW((CsmaParams{3, 5, 5, 7, true}.validate()));
  EXPECT_THROW((CsmaParams{4, 3, 4, 3, true}.validate()), std::invalid_argument);
  EXPECT_THROW((CsmaParams{3, 5, 6, 3, true}.validate()), std::invalid_argument);
  EXPECT_THROW((CsmaParams{3, 5, -1, 3, true}.validate()), std::invalid_argument);
  EXPECT_THROW((CsmaParams{3, 5, 4, 8, true}.validate()), std::invalid_argument);
}

TEST(Unslotted, StartDrawsBackoffFromMinBe) {
  CsmaParams p;
  RngStream rng(1);
  std::set<std::int64_t> waits;
  for (int i = 0; i < 2000; ++i) {
    const auto r = step({}, MacInput::start_tx, p, rng);
    EXPECT_EQ(r.state.nb, 0);
    EXPECT_EQ(r.state.be, 3);
    EXPECT_EQ(r.state.phase, MacPhase::backoff);
    ASSERT_EQ(r.action.kind, ActionKind::wait);
    ASSERT_EQ(r.action.duration.count() % 20, 0);
    waits.insert(r.action.duration.count());
  }
  EXPECT_EQ(waits, (std::set<std::int64_t>{0, 20, 40, 60, 80, 100, 120, 140}));
}

TEST(Unslotted, FiveBusyChannelsFailWithDefaults) {
  CsmaParams p;
  RngStream rng(2);
  auto r = step({}, MacInput::start_tx, p, rng);
  for (int i = 0; i < 5; ++i) {
    r = step(r.state, MacInput::backoff_expired, p, rng);
    ASSERT_EQ(r.action.kind, ActionKind::do_cca);
    r = step(r.state, MacInput::cca_busy, p, rng);
    EXPECT_EQ(r.state.nb, i + 1);
    EXPECT_EQ(r.state.be, std::min(3 + i + 1, 5));
    if (i < 4) ASSERT_EQ(r.action.kind, ActionKind::wait);
  }
  EXPECT_EQ(r.action.kind, ActionKind::fail);
  EXPECT_EQ(r.action.reason, FailReason::channel_access_failure);
  EXPECT_EQ(r.state.retries, 0);
}

TEST(Unslotted, DegenerateMinimumFailsOnFirstBusy) {
  CsmaParams p{0, 0, 0, 3, true};
  RngStream rng(3);
  auto r = step({}, MacInput::start_tx, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::wait);
  EXPECT_EQ(r.action.duration, SimTime(0));
  r = step(r.state, MacInput::backoff_expired, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::do_cca);
  r = step(r.state, MacInput::cca_busy, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::fail);
}

TEST(Unslotted, IdleTransmitsThenWaitsForAck) {
  CsmaParams p;
  RngStream rng(4);
  auto r = step({}, MacInput::start_tx, p, rng);
  r = step(r.state, MacInput::backoff_expired, p, rng);
  r = step(r.state, MacInput::cca_idle, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::transmit);
  r = step(r.state, MacInput::tx_done, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::arm_ack_timeout);
  EXPECT_EQ(r.action.duration, SimTime(54));
  r = step(r.state, MacInput::ack_received, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::success);
  EXPECT_EQ(r.state.transmissions, 1);
}

TEST(Unslotted, WithoutAckTxDoneIsSuccess) {
  CsmaParams p;
  p.ack_enabled = false;
  RngStream rng(4);
  auto r = step({}, MacInput::start_tx, p, rng);
  r = step(r.state, MacInput::backoff_expired, p, rng);
  r = step(r.state, MacInput::cca_idle, p, rng);
  r = step(r.state, MacInput::tx_done, p, rng);
  EXPECT_EQ(r.action.kind, ActionKind::success);
}

TEST(Unslotted, AckTimeoutsExhaustRetries) {
  CsmaParams p;
  RngStream rng(5);
  auto r = step({}, MacInput::start_tx, p, rng);
  for (int attempt = 0; attempt <= p.max_frame_retries; ++attempt) {
    r = step(r.state, MacInput::backoff_expired, p, rng);
    r = step(r.state, MacInput::cca_idle, p, rng);
    r = step(r.state, MacInput::tx_done, p, rng);
    r = step(r.state, MacInput::ack_timeout, p, rng);
    if (attempt < p.max_frame_retries) {
      ASSERT_EQ(r.action.kind, ActionKind::wait);
      EXPECT_EQ(r.state.nb, 0);
      EXPECT_EQ(r.state.be, p.min_be);
    }
  }
  EXPECT_EQ(r.action.kind, ActionKind::fail);
  EXPECT_EQ(r.action.reason, FailReason::retry_exhausted);
  EXPECT_EQ(r.state.transmissions, p.max_frame_retries + 1);
}

TEST(Unslotted, UndefinedInputsThrow) {
  CsmaParams p;
  RngStream rng(6);
  EXPECT_THROW(step({}, MacInput::cca_idle, p, rng), ProtocolViolation);
  auto r = step({}, MacInput::start_tx, p, rng);
  EXPECT_THROW(step(r.state, MacInput::start_tx, p, rng), ProtocolViolation);
  EXPECT_THROW(step(r.state, MacInput::ack_received, p, rng), ProtocolViolation);
  EXPECT_THROW(step(r.state, MacInput::cap_resumed, p, rng), ProtocolViolation);
}

TEST(Slotted, TwoIdleCcasTransmit) {
  CsmaParams p;
  RngStream rng(7);
  auto r = slotted_step({}, MacInput::start_tx, p, roomy(), rng);
  EXPECT_EQ(r.state.cw, 2);
  r = slotted_step(r.state, MacInput::backoff_expired, p, roomy(), rng);
  r = slotted_step(r.state, MacInput::cca_idle, p, roomy(), rng);
  EXPECT_EQ(r.state.cw, 1);
  EXPECT_EQ(r.action.kind, ActionKind::do_cca);
  r = slotted_step(r.state, MacInput::cca_idle, p, roomy(), rng);
  EXPECT_EQ(r.state.cw, 0);
  EXPECT_EQ(r.action.kind, ActionKind::transmit);
}

TEST(Slotted, BusySecondCcaResetsWindow) {
  CsmaParams p;
  RngStream rng(8);
  auto r = slotted_step({}, MacInput::start_tx, p, roomy(), rng);
  r = slotted_step(r.state, MacInput::backoff_expired, p, roomy(), rng);
  r = slotted_step(r.state, MacInput::cca_idle, p, roomy(), rng);
  r = slotted_step(r.state, MacInput::cca_busy, p, roomy(), rng);
  EXPECT_EQ(r.state.cw, 2);
  EXPECT_EQ(r.state.nb, 1);
  EXPECT_EQ(r.state.be, 4);
  EXPECT_EQ(r.action.kind, ActionKind::wait);
}

TEST(Slotted, DefersWhenTransactionDoesNotFit) {
  CsmaParams p;
  RngStream rng(9);
  const SlotContext tight{SimTime(50), SimTime(188)};
  auto r = slotted_step({}, MacInput::start_tx, p, tight, rng);
  r = slotted_step(r.state, MacInput::backoff_expired, p, tight, rng);
  r = slotted_step(r.state, MacInput::cca_idle, p, tight, rng);
  ASSERT_EQ(r.action.kind, ActionKind::do_cca);
  r = slotted_step(r.state, MacInput::cca_idle, p, tight, rng);
  EXPECT_EQ(r.action.kind, ActionKind::defer);
  EXPECT_EQ(r.state.phase, MacPhase::deferred);
  EXPECT_EQ(r.state.cw, 2);
  EXPECT_EQ(r.state.nb, 0);
  r = slotted_step(r.state, MacInput::cap_resumed, p, roomy(), rng);
  EXPECT_EQ(r.action.kind, ActionKind::do_cca);
  r = slotted_step(r.state, MacInput::cca_idle, p, roomy(), rng);
  r = slotted_step(r.state, MacInput::cca_idle, p, roomy(), rng);
  EXPECT_EQ(r.action.kind, ActionKind::transmit);
}

TEST(Slotted, ExactFitTransmits) {
  CsmaParams p;
  RngStream rng(9);
  const SlotContext exact{SimTime(188), SimTime(188)};
  TxAttemptState s;
  s.phase = MacPhase::cca;
  s.cw = 1;
  s.be = 3;
  EXPECT_EQ(slotted_step(s, MacInput::cca_idle, p, exact, rng).action.kind, ActionKind::transmit);
}

TEST(MacQueue, CapacityAndDropNew) {
  MacQueue q(1);
  EXPECT_TRUE(q.offer(Frame::data(1, 0, 60)));
  EXPECT_FALSE(q.offer(Frame::data(1, 0, 40)));
  EXPECT_EQ(q.pop()->msdu_len, 60);
  EXPECT_FALSE(q.pop());
  MacQueue none(0);
  EXPECT_FALSE(none.offer(Frame::data(1, 0, 60)));
}

TEST(AckRespond, TimingAndConditions) {
  TxOutcome data{Frame::data(3, 0, 60), SimTime(1000), SimTime(1154), false, true};
  const auto plan = ack_respond(0, data, true);
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->start, SimTime(1166));
  EXPECT_EQ(plan->end, SimTime(1154 + 12 + 22));
  EXPECT_EQ(plan->frame.dst, 3u);
  data.delivered = false;
  data.collided = true;
  EXPECT_FALSE(ack_respond(0, data, true));
  data.delivered = true;
  EXPECT_FALSE(ack_respond(0, data, false));
  EXPECT_EQ(transaction_time(71, true), SimTime(188));
  EXPECT_EQ(transaction_time(71, false), SimTime(154));
}

#include "support/mac_properties.hpp"

TEST(Properties, UnslottedRandomTraces) {
  props::PropertyStats st;
  const auto bad = props::check_mac_properties(false, 20'000, 1, &st);
  EXPECT_FALSE(bad) << *bad;
  EXPECT_GT(st.successes, 0);
  EXPECT_GT(st.access_failures, 0);
  EXPECT_GT(st.retry_failures, 0);
}

TEST(Properties, SlottedRandomTraces) {
  props::PropertyStats st;
  const auto bad = props::check_mac_properties(true, 20'000, 2, &st);
  EXPECT_FALSE(bad) << *bad;
  EXPECT_GT(st.deferrals, 0);
  EXPECT_GT(st.access_failures, 0);
}

TEST(Properties, IdealChannelUsesOneCcaPerAttempt) {
  CsmaParams p;
  RngStream rng(10);
  for (int i = 0; i < 100; ++i) {
    auto r = unslotted_step({}, MacInput::start_tx, p, rng);
    r = unslotted_step(r.state, MacInput::backoff_expired, p, rng);
    r = unslotted_step(r.state, MacInput::cca_idle, p, rng);
    r = unslotted_step(r.state, MacInput::tx_done, p, rng);
    r = unslotted_step(r.state, MacInput::ack_received, p, rng);
    EXPECT_EQ(r.action.kind, ActionKind::success);
    EXPECT_EQ(r.state.ccas_this_run, 1);
  }
}
