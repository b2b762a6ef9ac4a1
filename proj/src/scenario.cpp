#include "wpansim/scenario.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wpansim {

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

const char* to_string(Mode m) { return m == Mode::beacon ? "beacon" : "nonbeacon"; }
const char* to_string(Placement p) { return p == Placement::random ? "random" : "equal"; }

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void ScenarioSpec::validate() const {
  require(n_devices >= 1 && n_devices <= 1000, "n_devices must be in [1, 1000]");
  require(msdu_cap >= 1, "msdu_cap must be positive");
  require(msdu >= 1 && msdu <= msdu_cap, "msdu must be in [1, " + std::to_string(msdu_cap) + "]");
  require(interval > 0.0 && std::isfinite(interval), "interval must be positive");
  require(min_be >= 0 && min_be <= max_be, "min_be must be in [0, max_be]");
  require(max_be >= min_be && max_be <= 8, "max_be must be in [min_be, 8]");
  require(max_nb >= 0 && max_nb <= 5, "max_nb must be in [0, 5]");
  require(max_frame_retries >= 0 && max_frame_retries <= 7, "max_frame_retries must be in [0, 7]");
  require(queue_capacity >= 0, "queue_capacity must be non-negative");
  require(radius >= 0.0, "radius must be non-negative");
  require(mac_overhead >= 0 && phy_overhead >= 0 && ack_mpdu > 0, "frame overheads must be non-negative");
  if (mode == Mode::beacon) {
    require(bo >= 0 && bo <= kMaxOrder, "bo must be in [0, 14]");
    require(so >= 0 && so <= bo, "so must be in [0, bo]");
    require(beacon_mpdu > 0, "beacon_mpdu must be positive");
    require(run_time > 0.0 && std::isfinite(run_time), "run_time must be positive");
  } else {
    require(quota >= 1, "quota must be at least 1");
  }
}

NetworkConfig ScenarioSpec::to_network(std::uint64_t run_seed) const {
  validate();
  NetworkConfig c;
  c.mode = mode;
  c.n_devices = n_devices;
  c.traffic.mean_interval = interval;
  c.traffic.distribution = distribution;
  c.traffic.msdu_size = msdu;
  c.traffic.quota = mode == Mode::nonbeacon ? std::optional<std::int64_t>(quota) : std::nullopt;
  c.msdu_cap = msdu_cap;
  c.csma = CsmaParams{min_be, max_be, max_nb, max_frame_retries, ack};
  c.superframe = SuperframeConfig{bo, so, beacon_mpdu};
  c.queue_capacity = static_cast<std::size_t>(queue_capacity);
  c.constants.mac_overhead = mac_overhead;
  c.constants.phy_overhead = phy_overhead;
  c.constants.ack_mpdu = ack_mpdu;
  c.radius_m = radius;
  c.placement = placement;
  c.run_time = SimTime::from_seconds(run_time);
  c.unresolved_as_dropped = count_unresolved;
  c.seed = run_seed;
  return c;
}

namespace {

enum class Scope { both, nonbeacon, beacon };

struct KeyRule {
  Scope scope;
  std::function<void(ScenarioSpec&, const YAML::Node&)> set;
};

template <typename T>
T scalar(const YAML::Node& n) {
  return n.as<T>();
}

int as_int(const YAML::Node& n) { return scalar<int>(n); }

Mode parse_mode(const std::string& s) {
  if (s == "nonbeacon") return Mode::nonbeacon;
  if (s == "beacon") return Mode::beacon;
  throw std::invalid_argument("mode must be 'nonbeacon' or 'beacon', got '" + s + "'");
}

Distribution parse_distribution(const std::string& s) {
  if (s == "exponential") return Distribution::exponential;
  if (s == "periodic") return Distribution::periodic;
  throw std::invalid_argument("distribution must be 'exponential' or 'periodic', got '" + s + "'");
}

Placement parse_placement(const std::string& s) {
  if (s == "equal") return Placement::equal;
  if (s == "random") return Placement::random;
  throw std::invalid_argument("placement must be 'equal' or 'random', got '" + s + "'");
}

const std::map<std::string, KeyRule>& key_rules() {
  static const std::map<std::string, KeyRule> rules = {
      {"mode", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.mode = parse_mode(n.as<std::string>()); }}},
      {"n_devices", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.n_devices = as_int(n); }}},
      {"msdu", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.msdu = as_int(n); }}},
      {"interval", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.interval = n.as<double>(); }}},
      {"distribution",
       {Scope::both,
        [](ScenarioSpec& s, const YAML::Node& n) { s.distribution = parse_distribution(n.as<std::string>()); }}},
      {"min_be", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.min_be = as_int(n); }}},
      {"max_be", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.max_be = as_int(n); }}},
      {"max_nb", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.max_nb = as_int(n); }}},
      {"max_frame_retries", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.max_frame_retries = as_int(n); }}},
      {"ack", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.ack = n.as<bool>(); }}},
      {"bo", {Scope::beacon, [](ScenarioSpec& s, const YAML::Node& n) { s.bo = as_int(n); }}},
      {"so", {Scope::beacon, [](ScenarioSpec& s, const YAML::Node& n) { s.so = as_int(n); }}},
      {"beacon_mpdu", {Scope::beacon, [](ScenarioSpec& s, const YAML::Node& n) { s.beacon_mpdu = as_int(n); }}},
      {"queue_capacity", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.queue_capacity = as_int(n); }}},
      {"quota", {Scope::nonbeacon, [](ScenarioSpec& s, const YAML::Node& n) { s.quota = n.as<std::int64_t>(); }}},
      {"run_time", {Scope::beacon, [](ScenarioSpec& s, const YAML::Node& n) { s.run_time = n.as<double>(); }}},
      {"seed", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.seed = n.as<std::uint64_t>(); }}},
      {"placement",
       {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.placement = parse_placement(n.as<std::string>()); }}},
      {"radius", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.radius = n.as<double>(); }}},
      {"count_unresolved", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.count_unresolved = n.as<bool>(); }}},
      {"msdu_cap", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.msdu_cap = as_int(n); }}},
      {"mac_overhead", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.mac_overhead = as_int(n); }}},
      {"phy_overhead", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.phy_overhead = as_int(n); }}},
      {"ack_mpdu", {Scope::both, [](ScenarioSpec& s, const YAML::Node& n) { s.ack_mpdu = as_int(n); }}},
  };
  return rules;
}

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

// Maps a validation message back to the key it names, for line reporting.
int line_for_message(const YAML::Node& map, const std::string& msg, int fallback) {
  int best = fallback;
  std::size_t best_len = 0;
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (msg.rfind(key, 0) == 0 && key.size() > best_len) {
      best = line_of(kv.first);
      best_len = key.size();
    }
  }
  return best;
}

ScenarioSpec parse_scenario_map(const YAML::Node& map, const std::string& source) {
  if (!map.IsMap()) throw ConfigError(source, line_of(map), "scenario must be a mapping");
  ScenarioSpec spec;
  if (auto m = map["mode"]) {
    try {
      spec.mode = parse_mode(m.as<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(source, line_of(m), e.what());
    }
  }
  const auto& rules = key_rules();
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    auto it = rules.find(key);
    if (it == rules.end()) throw ConfigError(source, line_of(kv.first), "unknown key '" + key + "'");
    const Scope scope = it->second.scope;
    if ((scope == Scope::beacon && spec.mode != Mode::beacon) ||
        (scope == Scope::nonbeacon && spec.mode != Mode::nonbeacon)) {
      throw ConfigError(source, line_of(kv.first),
                        "key '" + key + "' does not apply to " + to_string(spec.mode) + " mode");
    }
    try {
      it->second.set(spec, kv.second);
    } catch (const YAML::Exception&) {
      throw ConfigError(source, line_of(kv.second), "bad value for '" + key + "'");
    } catch (const std::exception& e) {
      throw ConfigError(source, line_of(kv.second), e.what());
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, line_for_message(map, e.what(), line_of(map)), e.what());
  }
  return spec;
}

const std::vector<std::string> kSweepParams = {
    "n_devices", "msdu",     "interval",       "min_be", "max_be",   "max_nb", "max_frame_retries",
    "bo",      "so",       "bo_so",          "queue_capacity",     "quota",  "run_time",
    "radius",  "msdu_cap", "beacon_mpdu",
};

SweepSpec parse_sweep_map(const YAML::Node& map, const std::string& source) {
  SweepSpec sweep;
  bool have_base = false;
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (key != "name" && key != "base" && key != "axes" && key != "replications" && key != "seed_base")
      throw ConfigError(source, line_of(kv.first), "unknown sweep key '" + key + "'");
  }
  try {
    if (auto n = map["name"]) sweep.name = n.as<std::string>();
    if (auto n = map["replications"]) sweep.replications = n.as<int>();
    if (auto n = map["seed_base"]) sweep.seed_base = n.as<std::uint64_t>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(source, e.mark.line + 1, "bad sweep header value");
  }
  if (sweep.replications < 1) throw ConfigError(source, line_of(map["replications"]), "replications must be >= 1");
  if (auto b = map["base"]) {
    sweep.base = parse_scenario_map(b, source);
    have_base = true;
  }
  if (!have_base) throw ConfigError(source, line_of(map), "sweep needs a 'base' scenario");

  const auto axes = map["axes"];
  if (!axes.IsSequence()) throw ConfigError(source, line_of(axes), "'axes' must be a list");
  for (const auto& ax : axes) {
    if (!ax.IsMap()) throw ConfigError(source, line_of(ax), "axis must be a mapping with 'param' and 'values'");
    for (const auto& kv : ax) {
      const auto key = kv.first.as<std::string>();
      if (key != "param" && key != "values") throw ConfigError(source, line_of(kv.first), "unknown axis key '" + key + "'");
    }
    SweepAxis axis;
    if (!ax["param"]) throw ConfigError(source, line_of(ax), "axis needs 'param'");
    axis.param = ax["param"].as<std::string>();
    const auto values = ax["values"];
    if (!values || !values.IsSequence() || values.size() == 0)
      throw ConfigError(source, line_of(ax), "axis '" + axis.param + "' needs a non-empty 'values' list");
    for (const auto& v : values) {
      AxisValue av;
      try {
        if (v.IsSequence()) {
          if (v.size() != 2) throw ConfigError(source, line_of(v), "pair values need exactly two elements");
          av.value = v[0].as<double>();
          av.second = v[1].as<double>();
        } else {
          av.value = v.as<double>();
        }
        ScenarioSpec probe = sweep.base;
        apply_axis(probe, axis.param, av);
        probe.validate();
      } catch (const ConfigError&) {
        throw;
      } catch (const YAML::Exception&) {
        throw ConfigError(source, line_of(v), "bad value in axis '" + axis.param + "'");
      } catch (const std::exception& e) {
        throw ConfigError(source, line_of(v), e.what());
      }
      axis.values.push_back(av);
    }
    sweep.axes.push_back(std::move(axis));
  }
  return sweep;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

void emit_scenario(std::ostringstream& os, const ScenarioSpec& s, const std::string& indent) {
  auto kv = [&](const char* k, const std::string& v) { os << indent << k << ": " << v << '\n'; };
  kv("mode", to_string(s.mode));
  kv("n_devices", std::to_string(s.n_devices));
  kv("msdu", std::to_string(s.msdu));
  kv("interval", fmt_double(s.interval));
  kv("distribution", to_string(s.distribution));
  kv("min_be", std::to_string(s.min_be));
  kv("max_be", std::to_string(s.max_be));
  kv("max_nb", std::to_string(s.max_nb));
  kv("max_frame_retries", std::to_string(s.max_frame_retries));
  kv("ack", s.ack ? "true" : "false");
  if (s.mode == Mode::beacon) {
    kv("bo", std::to_string(s.bo));
    kv("so", std::to_string(s.so));
    kv("beacon_mpdu", std::to_string(s.beacon_mpdu));
    kv("run_time", fmt_double(s.run_time));
  } else {
    kv("quota", std::to_string(s.quota));
  }
  kv("queue_capacity", std::to_string(s.queue_capacity));
  kv("seed", std::to_string(s.seed));
  kv("placement", to_string(s.placement));
  kv("radius", fmt_double(s.radius));
  kv("count_unresolved", s.count_unresolved ? "true" : "false");
  kv("msdu_cap", std::to_string(s.msdu_cap));
  kv("mac_overhead", std::to_string(s.mac_overhead));
  kv("phy_overhead", std::to_string(s.phy_overhead));
  kv("ack_mpdu", std::to_string(s.ack_mpdu));
}

int as_integral(double v, const std::string& param) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument(param + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

const std::vector<std::string>& sweep_parameters() { return kSweepParams; }

void apply_axis(ScenarioSpec& s, const std::string& p, const AxisValue& v) {
  if (p == "bo_so") {
    if (!v.second) throw std::invalid_argument("bo_so values must be [bo, so] pairs");
    if (s.mode != Mode::beacon) throw std::invalid_argument("bo_so axis needs beacon mode");
    s.bo = as_integral(v.value, "bo");
    s.so = as_integral(*v.second, "so");
    return;
  }
  if (v.second) throw std::invalid_argument("axis '" + p + "' takes scalar values");
  const bool beacon_only = p == "bo" || p == "so" || p == "run_time" || p == "beacon_mpdu";
  if (beacon_only && s.mode != Mode::beacon) throw std::invalid_argument("axis '" + p + "' needs beacon mode");
  if (p == "quota" && s.mode != Mode::nonbeacon) throw std::invalid_argument("axis 'quota' needs nonbeacon mode");
  if (p == "n_devices") s.n_devices = as_integral(v.value, p);
  else if (p == "msdu") s.msdu = as_integral(v.value, p);
  else if (p == "interval") s.interval = v.value;
  else if (p == "min_be") s.min_be = as_integral(v.value, p);
  else if (p == "max_be") s.max_be = as_integral(v.value, p);
  else if (p == "max_nb") s.max_nb = as_integral(v.value, p);
  else if (p == "max_frame_retries") s.max_frame_retries = as_integral(v.value, p);
  else if (p == "bo") s.bo = as_integral(v.value, p);
  else if (p == "so") s.so = as_integral(v.value, p);
  else if (p == "queue_capacity") s.queue_capacity = as_integral(v.value, p);
  else if (p == "quota") s.quota = as_integral(v.value, p);
  else if (p == "run_time") s.run_time = v.value;
  else if (p == "radius") s.radius = v.value;
  else if (p == "msdu_cap") s.msdu_cap = as_integral(v.value, p);
  else if (p == "beacon_mpdu") s.beacon_mpdu = as_integral(v.value, p);
  else throw std::invalid_argument("unknown sweep parameter '" + p + "'");
}

std::size_t SweepSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

ScenarioSpec SweepSpec::point(std::size_t index) const {
  if (index >= point_count()) throw std::out_of_range("sweep point index out of range");
  ScenarioSpec s = base;
  // Last axis varies fastest.
  std::size_t rem = index;
  std::vector<std::size_t> idx(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    idx[i] = rem % axes[i].values.size();
    rem /= axes[i].values.size();
  }
  for (std::size_t i = 0; i < axes.size(); ++i) apply_axis(s, axes[i].param, axes[i].values[idx[i]]);
  return s;
}

LoadedSpec parse_spec(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  if (!root || !root.IsMap()) throw ConfigError(source, 1, "document must be a mapping");
  if (root["axes"] || root["base"]) return parse_sweep_map(root, source);
  return parse_scenario_map(root, source);
}

LoadedSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path.string());
}

std::string serialize(const ScenarioSpec& spec) {
  std::ostringstream os;
  emit_scenario(os, spec, "");
  return os.str();
}

std::string serialize(const SweepSpec& sweep) {
  std::ostringstream os;
  if (!sweep.name.empty()) os << "name: " << sweep.name << '\n';
  os << "replications: " << sweep.replications << '\n';
  os << "seed_base: " << sweep.seed_base << '\n';
  os << "base:\n";
  emit_scenario(os, sweep.base, "  ");
  os << "axes:\n";
  for (const auto& a : sweep.axes) {
    os << "  - param: " << a.param << '\n';
    os << "    values: [";
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (i) os << ", ";
      const auto& v = a.values[i];
      if (v.second) {
        os << '[' << fmt_double(v.value) << ", " << fmt_double(*v.second) << ']';
      } else {
        os << fmt_double(v.value);
      }
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace wpansim
