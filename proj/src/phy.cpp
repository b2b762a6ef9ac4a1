#include "wpansim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wpansim {

Frame Frame::data(NodeId src, NodeId dst, int msdu_len, const PhyMacConstants& c) {
  Frame f;
  f.kind = FrameKind::data;
  f.msdu_len = msdu_len;
  f.mpdu_len = msdu_len + c.mac_overhead;
  f.src = src;
  f.dst = dst;
  return f;
}

Frame Frame::ack(NodeId src, NodeId dst, std::uint32_t seq, const PhyMacConstants& c) {
  Frame f;
  f.kind = FrameKind::ack;
  f.mpdu_len = c.ack_mpdu;
  f.src = src;
  f.dst = dst;
  f.seq = seq;
  return f;
}

Frame Frame::beacon(NodeId src, int mpdu_len) {
  Frame f;
  f.kind = FrameKind::beacon;
  f.mpdu_len = mpdu_len;
  f.src = src;
  f.dst = kBroadcast;
  return f;
}

NodeId Channel::add_node(Position p, RadioProfile radio) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(NodePhy{id, p, radio});
  nodes_state_.emplace_back();
  return id;
}

bool Channel::in_range(NodeId a, NodeId b) const {
  const auto& na = nodes_.at(a);
  const auto& nb = nodes_.at(b);
  const double d = std::hypot(na.position.x - nb.position.x, na.position.y - nb.position.y);
  return d <= na.radio.range_m;
}

bool Channel::audible_at(NodeId src, NodeId receiver) const {
  return receiver == kBroadcast || src == receiver || in_range(src, receiver);
}

CcaResult Channel::cca(NodeId node, SimTime now) const {
  const auto& st = nodes_state_.at(node);
  if (st.asleep) throw ProtocolViolation("CCA requested by sleeping node " + std::to_string(node));
  if (st.transmitting) throw ProtocolViolation("CCA requested by transmitting node " + std::to_string(node));
  const SimTime window_start = now - c_.cca_duration;
  for (const auto& tx : txs_) {
    if (tx.frame.src == node) continue;
    if (tx.start < now && tx.end > window_start && in_range(tx.frame.src, node)) return CcaResult::busy;
  }
  return CcaResult::idle;
}

TxToken Channel::begin_tx(NodeId node, const Frame& frame, SimTime now) {
  auto& st = nodes_state_.at(node);
  if (st.asleep) throw ProtocolViolation("transmission by sleeping node " + std::to_string(node));
  if (st.transmitting) throw ProtocolViolation("concurrent transmission by node " + std::to_string(node));
  if (frame.src != node) throw ProtocolViolation("frame source does not match transmitter");
  prune(now);

  Transmission tx{next_tx_id_++, frame, now, now + airtime(frame)};
  for (auto& other : txs_) {
    if (other.finished || other.end <= now) continue;
    // Overlap with a live transmission. Each side is corrupted if the other
    // is audible at its receiver.
    if (audible_at(other.frame.src, frame.dst)) tx.corrupted = true;
    if (audible_at(node, other.frame.dst)) other.corrupted = true;
    // Half duplex: a receiver that starts transmitting loses what it hears.
    if (other.frame.dst == node) other.receiver_lost = true;
  }
  if (frame.dst != kBroadcast) {
    const auto& rx = nodes_state_.at(frame.dst);
    if (rx.transmitting || rx.asleep) tx.receiver_lost = true;
    tx.receiver_epoch = rx.sleep_epoch;
  }
  st.transmitting = true;
  txs_.push_back(tx);
  return TxToken{tx.id, tx.start, tx.end};
}

TxOutcome Channel::end_tx(const TxToken& token, SimTime now) {
  auto it = std::find_if(txs_.begin(), txs_.end(), [&](const Transmission& t) { return t.id == token.id; });
  if (it == txs_.end() || it->finished) throw SimulationError("unknown or finished transmission token");
  if (now != it->end) throw SimulationError("end_tx called at the wrong time");
  it->finished = true;
  nodes_state_.at(it->frame.src).transmitting = false;

  TxOutcome out{it->frame, it->start, it->end, it->corrupted, false};
  if (it->frame.dst != kBroadcast) {
    const auto& rx = nodes_state_.at(it->frame.dst);
    out.delivered = !it->corrupted && !it->receiver_lost && !rx.asleep && rx.sleep_epoch == it->receiver_epoch &&
                    in_range(it->frame.src, it->frame.dst);
  } else {
    out.delivered = !it->corrupted;
  }
  return out;
}

std::vector<TxOutcome> Channel::in_flight() const {
  std::vector<TxOutcome> out;
  for (const auto& t : txs_)
    if (!t.finished) out.push_back(TxOutcome{t.frame, t.start, t.end, t.corrupted, false});
  return out;
}

void Channel::set_sleeping(NodeId node, bool asleep) {
  auto& st = nodes_state_.at(node);
  if (asleep && st.transmitting) throw ProtocolViolation("node " + std::to_string(node) + " slept while transmitting");
  if (asleep && !st.asleep) ++st.sleep_epoch;
  st.asleep = asleep;
}

RadioState Channel::state(NodeId node, SimTime now) const {
  const auto& st = nodes_state_.at(node);
  if (st.asleep) return RadioState::sleeping;
  if (st.transmitting) return RadioState::transmitting;
  for (const auto& tx : txs_) {
    if (!tx.finished && tx.start <= now && tx.end > now && tx.frame.src != node && audible_at(tx.frame.src, node))
      return RadioState::receiving;
  }
  return RadioState::idle;
}

void Channel::prune(SimTime now) {
  // Finished frames are kept while they can still fall inside a CCA window.
  const SimTime horizon = now - c_.cca_duration;
  std::erase_if(txs_, [&](const Transmission& t) { return t.finished && t.end <= horizon; });
}

}  // namespace wpansim
