#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wpansim/csma.hpp"
#include "wpansim/kernel.hpp"
#include "wpansim/metrics.hpp"
#include "wpansim/phy.hpp"
#include "wpansim/rng.hpp"
#include "wpansim/superframe.hpp"

namespace wpansim {

enum class Mode : std::uint8_t { nonbeacon, beacon };
enum class Placement : std::uint8_t { equal, random };

/// Everything needed to build and run one star network.
struct NetworkConfig {
  Mode mode = Mode::nonbeacon;
  int n_devices = 1;
  TrafficConfig traffic;
  CsmaParams csma;
  SuperframeConfig superframe;
  std::size_t queue_capacity = 1;
  /// Largest accepted MSDU, in bytes.
  int msdu_cap = 118;
  PhyMacConstants constants;
  double radius_m = 50.0;
  Placement placement = Placement::equal;
  /// Beacon mode stops here; non-beacon mode stops when every quota is
  /// generated and resolved.
  SimTime run_time = SimTime::from_seconds(1000.0);
  bool unresolved_as_dropped = false;
  std::uint64_t seed = 1;
  /// Test hook: when false, slotted CSMA/CA transmits even if the
  /// transaction overruns the CAP.
  bool deference_enabled = true;
};

/// One MAC transition, for the optional text trace.
struct TraceRecord {
  SimTime time;
  NodeId node = 0;
  MacInput input = MacInput::start_tx;
  ActionKind action = ActionKind::wait;
  TxAttemptState state;
  std::int64_t superframe = -1;  // beacon mode only
  int slot = -1;  // -1 outside the active part
  bool in_cap = false;
};

/// Writes one line per record: time node input action phase NB BE CW
/// retries superframe slot period. Superframe fields are '-' in non-beacon
/// mode.
void write_trace_line(std::ostream& os, const TraceRecord& r, Mode mode);

struct NetworkObserver {
  std::function<void(NodeId, SimTime cca_start, CcaResult)> on_cca;
  std::function<void(const TxOutcome&)> on_tx_end;
  std::function<void(const TraceRecord&)> on_transition;
};

struct RunResult {
  SimSummary summary;
  MetricsRow metrics;
};

/// One-hop star: a PAN coordinator (node 0) at the centre and n devices on a
/// circle, all sending to the coordinator.
class StarNetwork {
 public:
  explicit StarNetwork(NetworkConfig cfg);

  void set_observer(NetworkObserver obs) { observer_ = std::move(obs); }

  /// Runs to the stop condition and returns the metrics. Call once.
  RunResult run();

  const std::vector<PacketRecord>& packets() const { return packets_; }
  const Channel& channel() const { return channel_; }
  const Kernel& kernel() const { return kernel_; }
  const NetworkConfig& config() const { return cfg_; }
  const std::optional<SuperframeSchedule>& schedule() const { return schedule_; }
  static constexpr NodeId coordinator() { return 0; }

 private:
  struct Device {
    NodeId id = 0;
    RngStream backoff_rng;
    RngStream traffic_rng;
    TxAttemptState mac;
    std::optional<Frame> in_service;
    MacQueue queue;
    std::int64_t generated = 0;
    std::uint32_t next_seq = 0;
    EventHandle ack_timer;
    std::optional<TxToken> tx;
    SimTime cca_start;
    bool sleep_after_tx = false;
  };

  void handle(const Event& ev);
  void on_arrival(Device& d);
  void on_tx_end(std::uint64_t token_id, NodeId src);
  void on_beacon(std::int64_t k);
  void on_cap_end();
  void on_ack_start(std::uint64_t plan_index);

  void start_next_frame(Device& d);
  void feed(Device& d, MacInput input);
  void apply(Device& d, MacInput input, const MacAction& action);
  void finish_frame(Device& d, std::optional<DropReason> drop);
  void begin_data_tx(Device& d);
  void maybe_sleep(NodeId node);
  SlotContext slot_context(const Device& d) const;
  bool done() const;
  Device& device(NodeId id) { return devices_.at(id - 1); }

  NetworkConfig cfg_;
  Kernel kernel_;
  Channel channel_;
  std::optional<SuperframeSchedule> schedule_;
  std::vector<Device> devices_;
  std::vector<PacketRecord> packets_;
  std::vector<std::pair<std::uint64_t, TxToken>> live_tx_;  // token id -> token, for tx_end
  std::vector<AckPlan> ack_plans_;
  std::optional<TxToken> coordinator_tx_;
  bool coordinator_sleep_after_tx_ = false;
  std::int64_t resolved_ = 0;
  std::int64_t devices_done_generating_ = 0;
  SimTime transaction_;
  NetworkObserver observer_;
  bool ran_ = false;
};

/// Device positions: coordinator at the origin, devices on the circle.
std::vector<Position> star_positions(int n_devices, double radius_m, Placement placement, std::uint64_t seed);

}  // namespace wpansim
