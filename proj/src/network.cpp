#include "wpansim/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wpansim {

namespace {

constexpr std::uint64_t kPlacementStream = 0x9D1AC3E5ULL;

// First grid boundary >= t, counting from the beacon that starts t's superframe.
SimTime align_up(const SuperframeSchedule& s, SimTime t) {
  const SimTime base = s.start_of(s.index(t));
  const std::int64_t unit = s.unit_backoff.count();
  const std::int64_t off = (t - base).count();
  return base + SimTime((off + unit - 1) / unit * unit);
}

}  // namespace

std::vector<Position> star_positions(int n_devices, double radius_m, Placement placement, std::uint64_t seed) {
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>(n_devices) + 1);
  out.push_back({0.0, 0.0});
  RngStream rng(derive_seed(seed, kPlacementStream));
  for (int i = 0; i < n_devices; ++i) {
    const double angle = placement == Placement::equal
                             ? 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_devices)
                             : 2.0 * std::numbers::pi * rng.next_unit();
    out.push_back({radius_m * std::cos(angle), radius_m * std::sin(angle)});
  }
  return out;
}

void write_trace_line(std::ostream& os, const TraceRecord& r, Mode mode) {
  os << r.time.count() << ' ' << r.node << ' ' << to_string(r.input) << ' ' << to_string(r.action) << ' '
     << to_string(r.state.phase) << ' ' << r.state.nb << ' ' << r.state.be << ' ' << r.state.cw << ' '
     << r.state.retries;
  if (mode == Mode::beacon) {
    os << ' ' << r.superframe << ' ' << r.slot << ' ' << (r.in_cap ? "CAP" : (r.slot < 0 ? "inactive" : "beacon"));
  } else {
    os << " - - -";
  }
  os << '\n';
}

StarNetwork::StarNetwork(NetworkConfig cfg) : cfg_(std::move(cfg)), channel_(cfg_.constants) {
  if (cfg_.n_devices < 1) throw std::invalid_argument("a star needs at least one device");
  cfg_.csma.validate();
  cfg_.traffic.validate(cfg_.msdu_cap);
  if (cfg_.mode == Mode::nonbeacon && !cfg_.traffic.quota)
    throw std::invalid_argument("non-beacon runs need a per-device packet quota");
  if (cfg_.mode == Mode::beacon) {
    schedule_ = SuperframeSchedule::make(cfg_.superframe, cfg_.constants);
    if (cfg_.run_time <= SimTime::zero()) throw std::invalid_argument("run time must be positive");
  }

  const auto positions = star_positions(cfg_.n_devices, cfg_.radius_m, cfg_.placement, cfg_.seed);
  for (const auto& p : positions) channel_.add_node(p);

  devices_.reserve(static_cast<std::size_t>(cfg_.n_devices));
  for (int i = 1; i <= cfg_.n_devices; ++i) {
    Device d;
    d.id = static_cast<NodeId>(i);
    d.backoff_rng = RngStream(derive_seed(cfg_.seed, 2 * static_cast<std::uint64_t>(i)));
    d.traffic_rng = RngStream(derive_seed(cfg_.seed, 2 * static_cast<std::uint64_t>(i) + 1));
    d.queue = MacQueue(cfg_.queue_capacity);
    devices_.push_back(std::move(d));
  }

  const int mpdu = cfg_.traffic.msdu_size + cfg_.constants.mac_overhead;
  transaction_ = transaction_time(mpdu, cfg_.csma.ack_enabled, cfg_.constants);
}

RunResult StarNetwork::run() {
  if (ran_) throw std::logic_error("StarNetwork::run called twice");
  ran_ = true;

  if (cfg_.mode == Mode::beacon) kernel_.schedule(SimTime::zero(), EventKind::beacon, coordinator(), 0);
  for (auto& d : devices_) kernel_.schedule(first_arrival(cfg_.traffic, d.traffic_rng), EventKind::arrival, d.id);

  const StopCondition stop =
      cfg_.mode == Mode::beacon ? StopCondition::at_time(cfg_.run_time) : StopCondition::when([this] { return done(); });

  RunResult result;
  result.summary = kernel_.run(stop, [this](const Event& ev) {
    try {
      handle(ev);
    } catch (const std::exception& e) {
      throw SimulationError("at t=" + std::to_string(ev.fire_time.count()) + " event " + to_string(ev.kind) +
                            " node " + std::to_string(ev.target) + ": " + e.what());
    }
  });
  if (result.summary.status == RunStatus::starved)
    throw SimulationError("event queue drained before every packet quota was generated and resolved");

  for (auto& d : devices_) {
    if (d.in_service) {
      packets_.at(d.in_service->packet_id).drop(DropReason::unresolved_at_end);
      d.in_service.reset();
    }
    while (auto f = d.queue.pop()) packets_.at(f->packet_id).drop(DropReason::unresolved_at_end);
  }
  if (packets_.empty()) throw SimulationError("no packets were generated before the run ended");

  SimTime t_start = packets_.front().gen_time;
  for (const auto& p : packets_) t_start = std::min(t_start, p.gen_time);
  result.metrics = compute_metrics(packets_, t_start, result.summary.final_time, cfg_.unresolved_as_dropped);
  return result;
}

bool StarNetwork::done() const {
  return devices_done_generating_ == cfg_.n_devices && resolved_ == static_cast<std::int64_t>(packets_.size());
}

void StarNetwork::handle(const Event& ev) {
  switch (ev.kind) {
    case EventKind::arrival: on_arrival(device(ev.target)); break;
    case EventKind::backoff_expired: feed(device(ev.target), MacInput::backoff_expired); break;
    case EventKind::cca_result: {
      Device& d = device(ev.target);
      const CcaResult r = channel_.cca(d.id, kernel_.now());
      if (observer_.on_cca) observer_.on_cca(d.id, d.cca_start, r);
      feed(d, r == CcaResult::idle ? MacInput::cca_idle : MacInput::cca_busy);
      break;
    }
    case EventKind::tx_start: begin_data_tx(device(ev.target)); break;
    case EventKind::tx_end: on_tx_end(ev.payload, ev.target); break;
    case EventKind::ack_timeout: feed(device(ev.target), MacInput::ack_timeout); break;
    case EventKind::ack_start: on_ack_start(ev.payload); break;
    case EventKind::beacon: on_beacon(static_cast<std::int64_t>(ev.payload)); break;
    case EventKind::cap_end: on_cap_end(); break;
    case EventKind::superframe_start: feed(device(ev.target), MacInput::cap_resumed); break;
    case EventKind::custom: break;
  }
}

void StarNetwork::on_arrival(Device& d) {
  const SimTime now = kernel_.now();
  PacketRecord rec;
  rec.node = d.id;
  rec.gen_time = now;
  rec.msdu_len = cfg_.traffic.msdu_size;
  packets_.push_back(rec);

  Frame f = Frame::data(d.id, coordinator(), cfg_.traffic.msdu_size, cfg_.constants);
  f.seq = d.next_seq++;
  f.packet_id = packets_.size() - 1;

  ++d.generated;
  if (!cfg_.traffic.quota || d.generated < *cfg_.traffic.quota) {
    kernel_.schedule_in(next_interarrival(cfg_.traffic, d.traffic_rng), EventKind::arrival, d.id);
  } else {
    ++devices_done_generating_;
  }

  if (!d.in_service) {
    d.in_service = f;
    feed(d, MacInput::start_tx);
  } else if (!d.queue.offer(f)) {
    packets_.back().drop(DropReason::queue_overflow);
    ++resolved_;
  }
}

SlotContext StarNetwork::slot_context(const Device&) const {
  const auto& s = *schedule_;
  const SimTime now = kernel_.now();
  const SimTime next = align_up(s, now);
  SlotContext ctx;
  ctx.cap_remaining = s.start_of(s.index(now)) + s.cap_end - next;
  ctx.transaction = cfg_.deference_enabled ? transaction_ : SimTime(1);
  return ctx;
}

void StarNetwork::feed(Device& d, MacInput input) {
  StepResult r = cfg_.mode == Mode::beacon
                     ? slotted_step(d.mac, input, cfg_.csma, slot_context(d), d.backoff_rng)
                     : unslotted_step(d.mac, input, cfg_.csma, d.backoff_rng);
  d.mac = r.state;
  if (observer_.on_transition) {
    TraceRecord tr;
    tr.time = kernel_.now();
    tr.node = d.id;
    tr.input = input;
    tr.action = r.action.kind;
    tr.state = r.state;
    if (schedule_) {
      tr.superframe = schedule_->index(tr.time);
      tr.slot = schedule_->slot_index(tr.time);
      tr.in_cap = schedule_->in_cap(tr.time);
    }
    observer_.on_transition(tr);
  }
  apply(d, input, r.action);
}

void StarNetwork::apply(Device& d, MacInput, const MacAction& action) {
  const SimTime now = kernel_.now();
  const bool slotted = cfg_.mode == Mode::beacon;
  switch (action.kind) {
    case ActionKind::wait:
      if (slotted) {
        const SimTime expiry = schedule_->countdown(schedule_->next_boundary_in_cap(now), action.periods);
        kernel_.schedule(expiry, EventKind::backoff_expired, d.id);
      } else {
        kernel_.schedule_in(action.duration, EventKind::backoff_expired, d.id);
      }
      break;
    case ActionKind::do_cca:
      d.cca_start = slotted ? align_up(*schedule_, now) : now;
      kernel_.schedule(d.cca_start + cfg_.constants.cca_duration, EventKind::cca_result, d.id);
      break;
    case ActionKind::transmit:
      if (slotted) {
        kernel_.schedule(align_up(*schedule_, now), EventKind::tx_start, d.id);
      } else {
        begin_data_tx(d);
      }
      break;
    case ActionKind::arm_ack_timeout:
      d.ack_timer = kernel_.schedule_in(action.duration, EventKind::ack_timeout, d.id);
      break;
    case ActionKind::defer: {
      const auto& s = *schedule_;
      kernel_.schedule(s.start_of(s.index(now) + 1) + s.cap_start, EventKind::superframe_start, d.id);
      break;
    }
    case ActionKind::success: finish_frame(d, std::nullopt); break;
    case ActionKind::fail:
      finish_frame(d, action.reason == FailReason::channel_access_failure ? DropReason::channel_access_failure
                                                                           : DropReason::retry_exhausted);
      break;
  }
}

void StarNetwork::begin_data_tx(Device& d) {
  const TxToken tok = channel_.begin_tx(d.id, *d.in_service, kernel_.now());
  d.tx = tok;
  live_tx_.emplace_back(tok.id, tok);
  kernel_.schedule(tok.end, EventKind::tx_end, d.id, tok.id);
}

void StarNetwork::finish_frame(Device& d, std::optional<DropReason> drop) {
  PacketRecord& rec = packets_.at(d.in_service->packet_id);
  if (drop) {
    rec.drop(*drop);
  } else if (cfg_.csma.ack_enabled) {
    rec.deliver(kernel_.now());
  }
  // Without ACKs the outcome was settled when the data frame ended.
  ++resolved_;
  d.in_service.reset();
  if (auto next = d.queue.pop()) {
    d.in_service = *next;
    feed(d, MacInput::start_tx);
  }
}

void StarNetwork::on_tx_end(std::uint64_t token_id, NodeId src) {
  auto it = std::find_if(live_tx_.begin(), live_tx_.end(), [&](const auto& p) { return p.first == token_id; });
  if (it == live_tx_.end()) throw SimulationError("tx_end for unknown transmission");
  const TxToken tok = it->second;
  live_tx_.erase(it);
  const TxOutcome out = channel_.end_tx(tok, kernel_.now());
  if (observer_.on_tx_end) observer_.on_tx_end(out);

  switch (out.frame.kind) {
    case FrameKind::data: {
      Device& d = device(src);
      d.tx.reset();
      if (auto plan = ack_respond(coordinator(), out, cfg_.csma.ack_enabled, cfg_.constants)) {
        ack_plans_.push_back(*plan);
        kernel_.schedule(plan->start, EventKind::ack_start, coordinator(), ack_plans_.size() - 1);
      }
      if (!cfg_.csma.ack_enabled) {
        PacketRecord& rec = packets_.at(out.frame.packet_id);
        if (out.delivered) {
          rec.deliver(out.end);
        } else {
          rec.drop(DropReason::retry_exhausted);
        }
      }
      maybe_sleep(src);
      maybe_sleep(coordinator());
      feed(d, MacInput::tx_done);
      break;
    }
    case FrameKind::ack: {
      coordinator_tx_.reset();
      maybe_sleep(coordinator());
      Device& d = device(out.frame.dst);
      const bool expected = d.mac.phase == MacPhase::awaiting_ack && d.in_service &&
                            d.in_service->seq == out.frame.seq && kernel_.is_pending(d.ack_timer);
      if (out.delivered && expected) {
        kernel_.cancel(d.ack_timer);
        feed(d, MacInput::ack_received);
      }
      maybe_sleep(d.id);
      break;
    }
    case FrameKind::beacon:
      coordinator_tx_.reset();
      maybe_sleep(coordinator());
      break;
  }
}

void StarNetwork::on_ack_start(std::uint64_t plan_index) {
  const AckPlan& plan = ack_plans_.at(plan_index);
  // A coordinator that is itself busy or asleep simply sends no ACK.
  if (channel_.is_transmitting(coordinator()) || channel_.is_sleeping(coordinator())) return;
  const TxToken tok = channel_.begin_tx(coordinator(), plan.frame, kernel_.now());
  coordinator_tx_ = tok;
  live_tx_.emplace_back(tok.id, tok);
  kernel_.schedule(tok.end, EventKind::tx_end, coordinator(), tok.id);
}

void StarNetwork::on_beacon(std::int64_t k) {
  const auto& s = *schedule_;
  for (NodeId n = 0; n < channel_.node_count(); ++n) channel_.set_sleeping(n, false);
  coordinator_sleep_after_tx_ = false;
  for (auto& d : devices_) d.sleep_after_tx = false;

  const Frame beacon = Frame::beacon(coordinator(), cfg_.superframe.beacon_mpdu);
  const TxToken tok = channel_.begin_tx(coordinator(), beacon, kernel_.now());
  coordinator_tx_ = tok;
  live_tx_.emplace_back(tok.id, tok);
  kernel_.schedule(tok.end, EventKind::tx_end, coordinator(), tok.id);

  if (s.sd < s.bi) kernel_.schedule(s.start_of(k) + s.sd, EventKind::cap_end, coordinator());
  kernel_.schedule(s.start_of(k + 1), EventKind::beacon, coordinator(), static_cast<std::uint64_t>(k + 1));
}

void StarNetwork::on_cap_end() {
  const SimTime now = kernel_.now();
  // Frames ending exactly now still belong to the CAP, so their receivers
  // stay up until the frame completes. A receiver of a frame that runs past
  // the CAP sleeps now and loses it. Transmitters sleep when they finish.
  std::vector<bool> defer(channel_.node_count(), false);
  for (const auto& f : channel_.in_flight()) {
    defer.at(f.frame.src) = true;
    if (f.end == now && f.frame.dst != kBroadcast) defer.at(f.frame.dst) = true;
  }
  for (NodeId n = 0; n < channel_.node_count(); ++n) {
    if (!defer[n]) {
      channel_.set_sleeping(n, true);
    } else if (n == coordinator()) {
      coordinator_sleep_after_tx_ = true;
    } else {
      device(n).sleep_after_tx = true;
    }
  }
}

void StarNetwork::maybe_sleep(NodeId node) {
  bool& pending = node == coordinator() ? coordinator_sleep_after_tx_ : device(node).sleep_after_tx;
  if (!pending || channel_.is_transmitting(node)) return;
  pending = false;
  channel_.set_sleeping(node, true);
}

}  // namespace wpansim
