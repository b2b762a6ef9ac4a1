#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wpansim/kernel.hpp"
#include "wpansim/sim_time.hpp"

namespace wpansim {

/// Timing and framing constants of the 2.4 GHz PHY and the MAC.
struct PhyMacConstants {
  SimTime base_superframe_duration{960};
  SimTime unit_backoff_period{20};
  SimTime min_cap_length{440};
  SimTime turnaround{12};
  SimTime cca_duration{8};
  SimTime ack_wait_duration{54};
  int phy_overhead = 6;  // preamble + SFD + PHR
  int mac_overhead = 11;  // short-address MHR + FCS
  int ack_mpdu = 5;
  int max_phy_packet = 127;
  static constexpr int kSymbolsPerByte = 2;
};

/// On-air duration of an MPDU, including the PHY header.
constexpr SimTime frame_airtime(int mpdu_len, const PhyMacConstants& c = {}) {
  return SimTime((mpdu_len + c.phy_overhead) * PhyMacConstants::kSymbolsPerByte);
}

/// Largest MSDU that fits in one PHY packet with the configured overheads.
constexpr int max_msdu(const PhyMacConstants& c = {}) { return c.max_phy_packet - c.mac_overhead; }

/// Violations of the radio/MAC protocol (e.g. CCA while asleep).
class ProtocolViolation : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

inline constexpr NodeId kBroadcast = 0xFFFF'FFFFu;

enum class FrameKind : std::uint8_t { data, ack, beacon };

struct Frame {
  FrameKind kind = FrameKind::data;
  int msdu_len = 0;
  int mpdu_len = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t seq = 0;
  std::uint64_t packet_id = 0;  // index of the originating PacketRecord (data only)

  static Frame data(NodeId src, NodeId dst, int msdu_len, const PhyMacConstants& c = {});
  static Frame ack(NodeId src, NodeId dst, std::uint32_t seq, const PhyMacConstants& c = {});
  static Frame beacon(NodeId src, int mpdu_len);
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

enum class RadioState : std::uint8_t { idle, transmitting, receiving, sleeping };
enum class CcaResult : std::uint8_t { idle, busy };

/// Static radio parameters of a node. Only `range_m` affects the disc model;
/// power and sensitivity are carried for reporting.
struct RadioProfile {
  double tx_power_mw = 1.0;
  double sensitivity_dbm = -85.0;
  double range_m = 176.0;
};

struct NodePhy {
  NodeId id = 0;
  Position position;
  RadioProfile radio;
};

struct TxToken {
  std::uint64_t id = 0;
  SimTime start;
  SimTime end;
};

struct TxOutcome {
  Frame frame;
  SimTime start;
  SimTime end;
  bool collided = false;
  bool delivered = false;  // unicast: intact at an awake, non-transmitting receiver
};

/// Shared medium of a one-hop network under a binary-disc propagation model
/// with zero propagation delay.
///
/// Any temporal overlap of two transmissions audible at a receiver corrupts
/// both; there is no capture. A receiver that transmits or sleeps at any
/// point during a frame loses it.
class Channel {
 public:
  explicit Channel(PhyMacConstants constants = {}) : c_(constants) {}

  NodeId add_node(Position p, RadioProfile radio = {});
  std::size_t node_count() const { return nodes_.size(); }
  const NodePhy& node(NodeId id) const { return nodes_.at(id); }
  const PhyMacConstants& constants() const { return c_; }

  bool in_range(NodeId a, NodeId b) const;
  SimTime airtime(const Frame& f) const { return frame_airtime(f.mpdu_len, c_); }

  /// Busy iff another in-range transmission overlaps [now - cca_duration, now).
  CcaResult cca(NodeId node, SimTime now) const;

  /// Starts a transmission lasting airtime(frame). The caller must deliver
  /// end_tx at token.end.
  TxToken begin_tx(NodeId node, const Frame& frame, SimTime now);
  TxOutcome end_tx(const TxToken& token, SimTime now);

  /// Transmissions that have started but not yet ended.
  std::vector<TxOutcome> in_flight() const;

  void set_sleeping(NodeId node, bool asleep);
  RadioState state(NodeId node, SimTime now) const;
  bool is_transmitting(NodeId node) const { return nodes_state_.at(node).transmitting; }
  bool is_sleeping(NodeId node) const { return nodes_state_.at(node).asleep; }

 private:
  struct Transmission {
    std::uint64_t id;
    Frame frame;
    SimTime start;
    SimTime end;
    bool corrupted = false;
    bool receiver_lost = false;
    bool finished = false;
    std::uint64_t receiver_epoch = 0;
  };
  struct LiveState {
    bool transmitting = false;
    bool asleep = false;
    std::uint64_t sleep_epoch = 0;
  };

  bool audible_at(NodeId src, NodeId receiver) const;
  void prune(SimTime now);

  PhyMacConstants c_;
  std::vector<NodePhy> nodes_;
  std::vector<LiveState> nodes_state_;
  std::vector<Transmission> txs_;
  std::uint64_t next_tx_id_ = 1;
};

}  // namespace wpansim
