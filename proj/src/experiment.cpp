#include "wpansim/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wpansim {

MetricsRow run_scenario(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& opts) {
  StarNetwork net(spec.to_network(seed));
  if (opts.trace) {
    NetworkObserver obs;
    std::ostream* os = opts.trace;
    const Mode mode = spec.mode;
    obs.on_transition = [os, mode](const TraceRecord& r) { write_trace_line(*os, r, mode); };
    net.set_observer(std::move(obs));
  }
  const RunResult r = net.run();
  if (opts.packet_log) write_packet_log(*opts.packet_log, net.packets(), r.metrics.t_start, r.metrics.t_end);
  return r.metrics;
}

namespace {

ResultRow run_row(const SweepSpec& sweep, const ScenarioSpec& spec, std::size_t point, int rep) {
  ResultRow row;
  row.point = point;
  row.replication = rep;
  row.seed = sweep.seed_for(point, rep);
  row.spec = spec;
  try {
    const MetricsRow m = run_scenario(spec, row.seed);
    row.effective_data_rate = m.effective_data_rate;
    row.packet_loss_rate = m.packet_loss_rate;
    row.mean_delay = m.mean_delay;
    row.generated = static_cast<double>(m.counts.generated);
    row.delivered = static_cast<double>(m.counts.delivered);
    row.queue_overflow = static_cast<double>(m.counts.queue_overflow);
    row.channel_access_failure = static_cast<double>(m.counts.channel_access_failure);
    row.retry_exhausted = static_cast<double>(m.counts.retry_exhausted);
    row.unresolved = static_cast<double>(m.counts.unresolved);
    row.t_start = static_cast<double>(m.t_start.count());
    row.t_end = static_cast<double>(m.t_end.count());
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

// Metric fields that are aggregated across replications.
constexpr double ResultRow::*kSummed[] = {
    &ResultRow::effective_data_rate, &ResultRow::packet_loss_rate, &ResultRow::generated,
    &ResultRow::delivered,           &ResultRow::queue_overflow,   &ResultRow::channel_access_failure,
    &ResultRow::retry_exhausted,     &ResultRow::unresolved,       &ResultRow::t_start,
    &ResultRow::t_end,
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::pair<ResultRow, ResultRow> aggregate(const std::vector<ResultRow>& runs) {
  ResultRow mean;
  mean.kind = RowKind::mean;
  mean.point = runs.front().point;
  mean.spec = runs.front().spec;
  mean.seed = 0;
  ResultRow sd = mean;
  sd.kind = RowKind::stddev;

  std::vector<const ResultRow*> good;
  for (const auto& r : runs)
    if (r.ok) good.push_back(&r);
  mean.samples = sd.samples = static_cast<int>(good.size());
  if (good.empty()) {
    mean.ok = sd.ok = false;
    mean.error = sd.error = "no successful runs";
    return {mean, sd};
  }
  for (auto field : kSummed) {
    std::vector<double> v;
    for (const auto* r : good) v.push_back(r->*field);
    mean.*field = mean_of(v);
    sd.*field = stddev_of(v);
  }
  std::vector<double> delays;
  for (const auto* r : good)
    if (r->mean_delay) delays.push_back(*r->mean_delay);
  if (!delays.empty()) {
    mean.mean_delay = mean_of(delays);
    sd.mean_delay = stddev_of(delays);
  }
  return {mean, sd};
}

}  // namespace

ResultsTable run_sweep(const SweepSpec& sweep, int jobs) {
  if (sweep.replications < 1) throw std::invalid_argument("replications must be >= 1");
  const std::size_t points = sweep.point_count();
  const auto reps = static_cast<std::size_t>(sweep.replications);
  std::vector<ScenarioSpec> specs;
  specs.reserve(points);
  for (std::size_t p = 0; p < points; ++p) specs.push_back(sweep.point(p));

  const std::size_t total = points * reps;
  std::vector<ResultRow> runs(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t p = i / reps;
      runs[i] = run_row(sweep, specs[p], p, static_cast<int>(i % reps));
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, 256));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, total); ++w) pool.emplace_back(worker);
  }

  ResultsTable table;
  table.name = sweep.name;
  table.rows = runs;
  for (std::size_t p = 0; p < points; ++p) {
    const std::vector<ResultRow> block(runs.begin() + static_cast<std::ptrdiff_t>(p * reps),
                                       runs.begin() + static_cast<std::ptrdiff_t>((p + 1) * reps));
    auto [m, s] = aggregate(block);
    table.rows.push_back(std::move(m));
    table.rows.push_back(std::move(s));
  }
  return table;
}

ResultsTable run_replications(const ScenarioSpec& spec, int replications, std::uint64_t seed_base, int jobs) {
  SweepSpec s;
  s.name = "run";
  s.base = spec;
  s.replications = replications;
  s.seed_base = seed_base;
  return run_sweep(s, jobs);
}

namespace {

const std::vector<std::string> kColumns = {
    "kind",
    "point",
    "replication",
    "seed",
    "status",
    "mode",
    "n_devices",
    "msdu",
    "interval",
    "distribution",
    "min_be",
    "max_be",
    "max_nb",
    "max_frame_retries",
    "ack",
    "bo",
    "so",
    "bo_so",
    "queue_capacity",
    "quota",
    "run_time",
    "effective_data_rate",
    "packet_loss_rate",
    "mean_delay",
    "mean_delay_symbols",
    "generated",
    "delivered",
    "queue_overflow",
    "channel_access_failure",
    "retry_exhausted",
    "unresolved",
    "t_start",
    "t_start_symbols",
    "t_end",
    "t_end_symbols",
    "samples",
    "error",
};

const char* kind_name(RowKind k) {
  switch (k) {
    case RowKind::run: return "run";
    case RowKind::mean: return "mean";
    case RowKind::stddev: return "stddev";
  }
  return "?";
}

std::string num(double v) { return fmt::format("{}", v); }

std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = c == ',' ? ';' : ' ';
  return s;
}

std::vector<std::string> cells(const ResultRow& r) {
  const auto& s = r.spec;
  const bool beacon = s.mode == Mode::beacon;
  const bool have = r.ok;
  auto metric = [&](double v) { return have ? num(v) : std::string("NA"); };
  const double sym = static_cast<double>(SimTime::kSymbolsPerSecond);
  return {
      kind_name(r.kind),
      std::to_string(r.point),
      r.kind == RowKind::run ? std::to_string(r.replication) : "NA",
      r.kind == RowKind::run ? std::to_string(r.seed) : "NA",
      r.ok ? "ok" : "failed",
      to_string(s.mode),
      std::to_string(s.n_devices),
      std::to_string(s.msdu),
      num(s.interval),
      to_string(s.distribution),
      std::to_string(s.min_be),
      std::to_string(s.max_be),
      std::to_string(s.max_nb),
      std::to_string(s.max_frame_retries),
      s.ack ? "true" : "false",
      beacon ? std::to_string(s.bo) : "NA",
      beacon ? std::to_string(s.so) : "NA",
      beacon ? fmt::format("{}:{}", s.bo, s.so) : "NA",
      std::to_string(s.queue_capacity),
      beacon ? "NA" : std::to_string(s.quota),
      beacon ? num(s.run_time) : "NA",
      metric(r.effective_data_rate),
      metric(r.packet_loss_rate),
      have && r.mean_delay ? num(*r.mean_delay) : "NA",
      have && r.mean_delay ? num(*r.mean_delay * sym) : "NA",
      metric(r.generated),
      metric(r.delivered),
      metric(r.queue_overflow),
      metric(r.channel_access_failure),
      metric(r.retry_exhausted),
      metric(r.unresolved),
      metric(r.t_start / sym),
      metric(r.t_start),
      metric(r.t_end / sym),
      metric(r.t_end),
      std::to_string(r.kind == RowKind::run ? (r.ok ? 1 : 0) : r.samples),
      clean(r.error),
  };
}

void write_line(std::ostream& os, const std::vector<std::string>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  os << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty() || s == "NA") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<std::string> csv_columns() { return kColumns; }

void write_csv(std::ostream& os, const ResultsTable& table) {
  write_line(os, kColumns);
  for (const auto& r : table.rows) write_line(os, cells(r));
}

int CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto v = split(line);
    if (t.header.empty()) {
      t.header = std::move(v);
      continue;
    }
    if (v.size() != t.header.size())
      throw std::runtime_error(fmt::format("line {}: expected {} fields, got {}", lineno, t.header.size(), v.size()));
    t.rows.push_back(std::move(v));
  }
  return t;
}

void emit_plot_data(std::ostream& os, const CsvTable& results, const std::string& x_axis, const std::string& metric,
                    const std::string& series_key) {
  os << "series,x,mean,stddev,n\n";
  if (results.header.empty() && results.rows.empty()) return;
  const int xi = results.column(x_axis);
  const int mi = results.column(metric);
  const int si = results.column(series_key);
  if (xi < 0) throw std::invalid_argument("unknown column '" + x_axis + "'");
  if (mi < 0) throw std::invalid_argument("unknown column '" + metric + "'");
  if (si < 0) throw std::invalid_argument("unknown column '" + series_key + "'");
  const int ki = results.column("kind");
  const int oi = results.column("status");

  // Series in order of first appearance; x sorted numerically.
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::vector<double>>> data;
  for (const auto& row : results.rows) {
    if (ki >= 0 && row[static_cast<std::size_t>(ki)] != "run") continue;
    if (oi >= 0 && row[static_cast<std::size_t>(oi)] != "ok") continue;
    const auto x = parse_number(row[static_cast<std::size_t>(xi)]);
    if (!x) continue;
    const std::string& s = row[static_cast<std::size_t>(si)];
    if (!data.contains(s)) order.push_back(s);
    auto& bucket = data[s][*x];
    if (const auto y = parse_number(row[static_cast<std::size_t>(mi)])) bucket.push_back(*y);
  }
  bool first = true;
  for (const auto& s : order) {
    if (!first) os << '\n';
    first = false;
    for (const auto& [x, ys] : data[s]) {
      if (ys.empty()) {
        os << s << ',' << num(x) << ",NA,NA,0\n";
      } else {
        os << s << ',' << num(x) << ',' << num(mean_of(ys)) << ',' << (ys.size() < 2 ? "NA" : num(stddev_of(ys)))
           << ',' << ys.size() << '\n';
      }
    }
  }
}

SweepSpec builtin_sweep(const std::string& name) {
  for (const auto& b : builtin_scenarios()) {
    if (b.name != name) continue;
    auto spec = parse_spec(b.yaml, "builtin:" + name);
    return std::get<SweepSpec>(spec);
  }
  throw std::invalid_argument("unknown built-in scenario '" + name + "'");
}

}  // namespace wpansim
