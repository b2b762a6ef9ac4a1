#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wpansim/scenario.hpp"

namespace wpansim {

struct RunOptions {
  std::ostream* packet_log = nullptr;
  std::ostream* trace = nullptr;
};

/// Builds the star for `spec` and runs it once with `seed`.
MetricsRow run_scenario(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& opts = {});

enum class RowKind : std::uint8_t { run, mean, stddev };

struct ResultRow {
  RowKind kind = RowKind::run;
  std::size_t point = 0;
  int replication = -1;  // -1 on aggregate rows
  std::uint64_t seed = 0;
  ScenarioSpec spec;
  bool ok = true;
  std::string error;
  // Metric values; aggregate rows hold the mean or sample stddev over the
  // point's successful runs.
  double effective_data_rate = 0.0;
  double packet_loss_rate = 0.0;
  std::optional<double> mean_delay;
  double generated = 0;
  double delivered = 0;
  double queue_overflow = 0;
  double channel_access_failure = 0;
  double retry_exhausted = 0;
  double unresolved = 0;
  double t_start = 0.0;  // seconds
  double t_end = 0.0;
  int samples = 1;  // successful runs behind an aggregate row
};

struct ResultsTable {
  std::string name;
  std::vector<ResultRow> rows;
};

/// Runs every (point, replication) pair on `jobs` worker threads. Rows come
/// out ordered by point then replication, followed by each point's mean and
/// stddev rows, whatever the completion order. A failed run is kept as a row
/// with ok == false.
ResultsTable run_sweep(const SweepSpec& sweep, int jobs = 1);

/// Runs a single scenario as a one-point sweep.
ResultsTable run_replications(const ScenarioSpec& spec, int replications, std::uint64_t seed_base, int jobs = 1);

/// CSV with a header row. Time columns appear in seconds and in symbols;
/// an undefined delay is written as NA.
void write_csv(std::ostream& os, const ResultsTable& table);
std::vector<std::string> csv_columns();

/// Column-name -> cell view of a results CSV, for post-processing.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 if absent
};
CsvTable read_csv(std::istream& is);

/// Writes `series,x,mean,stddev,n` with one block per series value, blocks
/// separated by a blank line. Only successful `run` rows are used; x values
/// are sorted numerically inside each block. Throws std::invalid_argument on
/// unknown columns.
void emit_plot_data(std::ostream& os, const CsvTable& results, const std::string& x_axis, const std::string& metric,
                    const std::string& series_key);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string yaml;
};

const std::vector<BuiltinScenario>& builtin_scenarios();
/// Throws std::invalid_argument for an unknown name.
SweepSpec builtin_sweep(const std::string& name);

}  // namespace wpansim
