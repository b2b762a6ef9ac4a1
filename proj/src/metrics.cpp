#include "wpansim/metrics.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wpansim {

void TrafficConfig::validate(int msdu_cap) const {
  if (!(mean_interval > 0.0)) throw std::invalid_argument("packet interval must be positive");
  if (msdu_size <= 0 || msdu_size > msdu_cap)
    throw std::invalid_argument("MSDU size must be in [1, " + std::to_string(msdu_cap) + "]");
  if (quota && *quota <= 0) throw std::invalid_argument("quota must be positive");
}

SimTime next_interarrival(const TrafficConfig& cfg, RngStream& rng) {
  if (cfg.distribution == Distribution::periodic) {
    const auto t = SimTime::from_seconds(cfg.mean_interval);
    return t.count() < 1 ? SimTime(1) : t;
  }
  return rng.exponential(cfg.mean_interval);
}

SimTime first_arrival(const TrafficConfig& cfg, RngStream& rng) {
  if (cfg.distribution == Distribution::periodic) {
    const auto period = SimTime::from_seconds(cfg.mean_interval).count();
    return SimTime(static_cast<std::int64_t>(rng.next_unit() * static_cast<double>(period)));
  }
  return rng.exponential(cfg.mean_interval);
}

void PacketRecord::deliver(SimTime at) {
  if (outcome != Outcome::pending) throw SimulationError("packet resolved twice");
  if (at < gen_time) throw SimulationError("packet delivered before it was generated");
  outcome = Outcome::delivered;
  rx_time = at;
}

void PacketRecord::drop(DropReason why) {
  if (outcome != Outcome::pending) throw SimulationError("packet resolved twice");
  outcome = Outcome::dropped;
  reason = why;
}

MetricCounts count_outcomes(std::span<const PacketRecord> log) {
  MetricCounts c;
  c.generated = static_cast<std::int64_t>(log.size());
  for (const auto& r : log) {
    switch (r.outcome) {
      case Outcome::pending: ++c.pending; break;
      case Outcome::delivered: ++c.delivered; break;
      case Outcome::dropped:
        switch (r.reason) {
          case DropReason::queue_overflow: ++c.queue_overflow; break;
          case DropReason::channel_access_failure: ++c.channel_access_failure; break;
          case DropReason::retry_exhausted: ++c.retry_exhausted; break;
          case DropReason::unresolved_at_end: ++c.unresolved; break;
        }
        break;
    }
  }
  return c;
}

double effective_data_rate(std::span<const PacketRecord> log, SimTime t_start, SimTime t_end) {
  if (t_end <= t_start) throw std::invalid_argument("effective data rate needs t_end > t_start");
  std::int64_t bits = 0;
  for (const auto& r : log)
    if (r.outcome == Outcome::delivered) bits += std::int64_t{r.msdu_len} * 8;
  return static_cast<double>(bits) / (t_end - t_start).seconds();
}

double packet_loss_rate(std::span<const PacketRecord> log, bool unresolved_as_dropped) {
  const auto c = count_outcomes(log);
  if (c.generated == 0) throw std::invalid_argument("packet loss rate needs at least one generated packet");
  const std::int64_t lost = c.dropped() + (unresolved_as_dropped ? c.unresolved : 0);
  const std::int64_t total = c.generated - (unresolved_as_dropped ? 0 : c.unresolved) - c.pending;
  if (total <= 0) throw std::invalid_argument("packet loss rate needs at least one resolved packet");
  return static_cast<double>(lost) / static_cast<double>(total);
}

std::optional<double> mean_end_to_end_delay(std::span<const PacketRecord> log) {
  std::int64_t sum = 0;
  std::int64_t n = 0;
  for (const auto& r : log) {
    if (r.outcome != Outcome::delivered) continue;
    sum += (r.rx_time - r.gen_time).count();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(sum) / static_cast<double>(n) / static_cast<double>(SimTime::kSymbolsPerSecond);
}

MetricsRow compute_metrics(std::span<const PacketRecord> log, SimTime t_start, SimTime t_end,
                           bool unresolved_as_dropped) {
  MetricsRow row;
  row.counts = count_outcomes(log);
  row.t_start = t_start;
  row.t_end = t_end;
  row.effective_data_rate = effective_data_rate(log, t_start, t_end);
  row.packet_loss_rate = packet_loss_rate(log, unresolved_as_dropped);
  row.mean_delay = mean_end_to_end_delay(log);
  return row;
}

void write_packet_log(std::ostream& os, std::span<const PacketRecord> log, SimTime t_start, SimTime t_end) {
  os << "# window " << t_start.count() << ' ' << t_end.count() << '\n';
  os << "node,gen_time_symbols,msdu,outcome,rx_time_symbols_or_reason\n";
  for (const auto& r : log) {
    os << r.node << ',' << r.gen_time.count() << ',' << r.msdu_len << ',';
    switch (r.outcome) {
      case Outcome::delivered: os << "delivered," << r.rx_time.count(); break;
      case Outcome::dropped: os << "dropped," << to_string(r.reason); break;
      case Outcome::pending: os << "pending,"; break;
    }
    os << '\n';
  }
}

namespace {

DropReason parse_reason(const std::string& s, int line) {
  for (auto r : {DropReason::queue_overflow, DropReason::channel_access_failure, DropReason::retry_exhausted,
                 DropReason::unresolved_at_end})
    if (s == to_string(r)) return r;
  throw std::runtime_error("packet log line " + std::to_string(line) + ": unknown drop reason '" + s + "'");
}

}  // namespace

PacketLog read_packet_log(std::istream& is) {
  PacketLog out;
  std::string line;
  int lineno = 0;
  bool have_window = false;
  bool have_header = false;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("packet log line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# window ", 0) == 0) {
      std::istringstream ws(line.substr(9));
      std::int64_t a = 0, b = 0;
      if (!(ws >> a >> b)) fail("malformed window line");
      out.t_start = SimTime(a);
      out.t_end = SimTime(b);
      have_window = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!have_header) {
      if (line != "node,gen_time_symbols,msdu,outcome,rx_time_symbols_or_reason") fail("unexpected header");
      have_header = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (line.back() == ',') cols.emplace_back();
    if (cols.size() != 5) fail("expected 5 columns");
    PacketRecord r;
    try {
      r.node = static_cast<NodeId>(std::stoul(cols[0]));
      r.gen_time = SimTime(std::stoll(cols[1]));
      r.msdu_len = std::stoi(cols[2]);
    } catch (const std::exception&) {
      fail("non-numeric field");
    }
    if (cols[3] == "delivered") {
      r.outcome = Outcome::delivered;
      try {
        r.rx_time = SimTime(std::stoll(cols[4]));
      } catch (const std::exception&) {
        fail("non-numeric rx time");
      }
    } else if (cols[3] == "dropped") {
      r.outcome = Outcome::dropped;
      r.reason = parse_reason(cols[4], lineno);
    } else if (cols[3] == "pending") {
      r.outcome = Outcome::pending;
    } else {
      fail("unknown outcome '" + cols[3] + "'");
    }
    out.records.push_back(r);
  }
  if (!have_window) throw std::runtime_error("packet log has no window line");
  return out;
}

const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::queue_overflow: return "queue_overflow";
    case DropReason::channel_access_failure: return "channel_access_failure";
    case DropReason::retry_exhausted: return "retry_exhausted";
    case DropReason::unresolved_at_end: return "unresolved_at_end";
  }
  return "?";
}

const char* to_string(Distribution d) { return d == Distribution::periodic ? "periodic" : "exponential"; }

}  // namespace wpansim
