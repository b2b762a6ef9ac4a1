#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wpansim/network.hpp"

namespace wpansim {

/// Configuration problem, reported as "source:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// One experiment point. Field names match the scenario-file keys.
struct ScenarioSpec {
  Mode mode = Mode::nonbeacon;
  int n_devices = 1;
  int msdu = 60;
  double interval = 0.025;  // seconds
  Distribution distribution = Distribution::exponential;
  int min_be = 3;
  int max_be = 5;
  int max_nb = 4;
  int max_frame_retries = 3;
  bool ack = true;
  int bo = 7;
  int so = 6;
  int beacon_mpdu = 13;
  int queue_capacity = 1;
  std::int64_t quota = 5000;  // non-beacon only
  double run_time = 1000.0;  // seconds, beacon only
  std::uint64_t seed = 1;
  Placement placement = Placement::equal;
  double radius = 50.0;
  bool count_unresolved = false;
  int msdu_cap = 118;
  int mac_overhead = 11;
  int phy_overhead = 6;
  int ack_mpdu = 5;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
  NetworkConfig to_network(std::uint64_t run_seed) const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Value of one sweep axis: a number, or a (BO, SO) pair for the `bo_so` axis.
struct AxisValue {
  double value = 0.0;
  std::optional<double> second;
  friend bool operator==(const AxisValue&, const AxisValue&) = default;
};

struct SweepAxis {
  std::string param;
  std::vector<AxisValue> values;
  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SweepSpec {
  std::string name;
  ScenarioSpec base;
  std::vector<SweepAxis> axes;
  int replications = 1;
  std::uint64_t seed_base = 1;

  /// Cartesian product of the axes, first axis outermost.
  std::size_t point_count() const;
  ScenarioSpec point(std::size_t index) const;
  std::uint64_t seed_for(std::size_t point, int rep) const { return stable_hash(seed_base, point, rep); }
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

using LoadedSpec = std::variant<ScenarioSpec, SweepSpec>;

/// Parses a scenario or sweep document. A document with an `axes` key is a
/// sweep. Unknown keys, range violations and keys that do not belong to the
/// chosen mode are ConfigErrors carrying `source` and a line number.
LoadedSpec parse_spec(const std::string& text, const std::string& source = "<string>");
LoadedSpec load_scenario(const std::filesystem::path& path);

std::string serialize(const ScenarioSpec& spec);
std::string serialize(const SweepSpec& sweep);

/// Applies a sweep axis value to a scenario. Throws std::invalid_argument on
/// unknown parameters or non-integral values for integer parameters.
void apply_axis(ScenarioSpec& spec, const std::string& param, const AxisValue& v);

/// Names accepted as sweep axes.
const std::vector<std::string>& sweep_parameters();

const char* to_string(Mode m);
const char* to_string(Placement p);

}  // namespace wpansim
