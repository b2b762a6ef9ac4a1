#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpansim/kernel.hpp"
#include "wpansim/rng.hpp"
#include "wpansim/sim_time.hpp"

namespace wpansim {

enum class Distribution : std::uint8_t { exponential, periodic };

struct TrafficConfig {
  double mean_interval = 0.025;  // seconds
  Distribution distribution = Distribution::exponential;
  int msdu_size = 60;
  /// Packets per device; unset means unlimited (time-bounded runs).
  std::optional<std::int64_t> quota = 5000;

  void validate(int msdu_cap) const;
};

/// Gap to the next packet of one device.
SimTime next_interarrival(const TrafficConfig& cfg, RngStream& rng);
/// Offset of a device's first packet: one interarrival for exponential
/// traffic, a uniform phase in [0, interval) for periodic traffic.
SimTime first_arrival(const TrafficConfig& cfg, RngStream& rng);

enum class DropReason : std::uint8_t { queue_overflow, channel_access_failure, retry_exhausted, unresolved_at_end };
enum class Outcome : std::uint8_t { pending, delivered, dropped };

struct PacketRecord {
  NodeId node = 0;
  SimTime gen_time;
  int msdu_len = 0;
  Outcome outcome = Outcome::pending;
  SimTime rx_time;  // delivered only
  DropReason reason = DropReason::queue_overflow;  // dropped only

  void deliver(SimTime at);
  void drop(DropReason why);
  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct MetricCounts {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t queue_overflow = 0;
  std::int64_t channel_access_failure = 0;
  std::int64_t retry_exhausted = 0;
  std::int64_t unresolved = 0;
  std::int64_t pending = 0;  // records without an outcome; zero after a finished run

  std::int64_t dropped() const { return queue_overflow + channel_access_failure + retry_exhausted; }
  friend bool operator==(const MetricCounts&, const MetricCounts&) = default;
};

MetricCounts count_outcomes(std::span<const PacketRecord> log);

/// Delivered MSDU bits per second over [t_start, t_end). Headers excluded.
double effective_data_rate(std::span<const PacketRecord> log, SimTime t_start, SimTime t_end);

/// Dropped / generated. Unresolved packets are left out of both terms
/// unless `unresolved_as_dropped` is set.
double packet_loss_rate(std::span<const PacketRecord> log, bool unresolved_as_dropped = false);

/// Mean generation-to-reception time in seconds over delivered packets,
/// pooled across nodes. nullopt when nothing was delivered.
std::optional<double> mean_end_to_end_delay(std::span<const PacketRecord> log);

struct MetricsRow {
  double effective_data_rate = 0.0;  // bit/s
  double packet_loss_rate = 0.0;
  std::optional<double> mean_delay;  // seconds
  MetricCounts counts;
  SimTime t_start;
  SimTime t_end;
  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

MetricsRow compute_metrics(std::span<const PacketRecord> log, SimTime t_start, SimTime t_end,
                           bool unresolved_as_dropped = false);

/// Line-oriented packet log. Column order is fixed:
///   node,gen_time_symbols,msdu,outcome,rx_time_symbols_or_reason
/// preceded by a `# window t_start t_end` line carrying the metric window.
void write_packet_log(std::ostream& os, std::span<const PacketRecord> log, SimTime t_start, SimTime t_end);

struct PacketLog {
  std::vector<PacketRecord> records;
  SimTime t_start;
  SimTime t_end;
};

/// Throws std::runtime_error with a line number on malformed input.
PacketLog read_packet_log(std::istream& is);

const char* to_string(DropReason r);
const char* to_string(Distribution d);

}  // namespace wpansim
