// wpansim: command-line front end for the star-network simulator.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "wpansim/experiment.hpp"

namespace {

using namespace wpansim;

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    os = &file;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of IEEE 802.15.4 star networks"};
  app.require_subcommand(1);

  std::string config, out, builtin, packet_log, trace, results, x_axis, metric, series, dump;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  int jobs = default_jobs();

  auto* run = app.add_subcommand("run", "Run one scenario and write a CSV row per replication");
  run->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Seed (overrides the file)");
  run->add_option("--replications", replications, "Replications (default 1)")->check(CLI::PositiveNumber);
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "CSV output path (default stdout)");
  run->add_option("--packet-log", packet_log, "Write the first replication's packet log here");
  run->add_option("--trace", trace, "Write the first replication's MAC trace here");

  auto* sweep = app.add_subcommand("sweep", "Run a sweep file or a built-in sweep");
  auto* cfg_opt = sweep->add_option("--config", config, "Sweep file")->check(CLI::ExistingFile);
  auto* bi_opt = sweep->add_option("--builtin", builtin, "Built-in sweep name");
  cfg_opt->excludes(bi_opt);
  sweep->add_option("--seed", seed, "Seed base (overrides the file)");
  sweep->add_option("--replications", replications, "Replications per point")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "CSV output path (default stdout)");

  auto* plot = app.add_subcommand("plot-data", "Turn a results CSV into per-series x/mean/stddev blocks");
  plot->add_option("--results", results, "Results CSV from run or sweep")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", x_axis, "Column for the x axis")->required();
  plot->add_option("--metric", metric, "Metric column")->required();
  plot->add_option("--series", series, "Column that splits the series")->required();
  plot->add_option("--out", out, "Output path (default stdout)");

  auto* list = app.add_subcommand("scenarios", "List built-in sweeps");
  list->add_option("--dump", dump, "Print the named built-in sweep file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto loaded = load_scenario(config);
      if (!std::holds_alternative<ScenarioSpec>(loaded))
        throw std::runtime_error(config + ": this is a sweep file; use the sweep subcommand");
      ScenarioSpec spec = std::get<ScenarioSpec>(loaded);
      if (seed) spec.seed = *seed;
      const ResultsTable table = run_replications(spec, replications.value_or(1), spec.seed, jobs);
      if (!packet_log.empty() || !trace.empty()) {
        std::ofstream log_file, trace_file;
        RunOptions opts;
        if (!packet_log.empty()) {
          log_file = open_out(packet_log);
          opts.packet_log = &log_file;
        }
        if (!trace.empty()) {
          trace_file = open_out(trace);
          opts.trace = &trace_file;
        }
        run_scenario(spec, stable_hash(spec.seed, 0, 0), opts);
      }
      Output o(out);
      write_csv(*o.os, table);
      for (const auto& r : table.rows)
        if (!r.ok) throw std::runtime_error("run failed: " + r.error);
    } else if (*sweep) {
      SweepSpec s;
      if (!builtin.empty()) {
        s = builtin_sweep(builtin);
      } else if (!config.empty()) {
        const auto loaded = load_scenario(config);
        if (!std::holds_alternative<SweepSpec>(loaded))
          throw std::runtime_error(config + ": not a sweep file (needs 'base' and 'axes')");
        s = std::get<SweepSpec>(loaded);
      } else {
        throw std::runtime_error("sweep needs --config or --builtin");
      }
      if (seed) s.seed_base = *seed;
      if (replications) s.replications = *replications;
      const ResultsTable table = run_sweep(s, jobs);
      Output o(out);
      write_csv(*o.os, table);
      int failed = 0;
      for (const auto& r : table.rows) failed += r.kind == RowKind::run && !r.ok;
      if (failed) {
        std::cerr << "wpansim: " << failed << " run(s) failed; see the error column\n";
        return 2;
      }
    } else if (*plot) {
      std::ifstream in(results);
      const CsvTable t = read_csv(in);
      Output o(out);
      emit_plot_data(*o.os, t, x_axis, metric, series);
    } else if (*list) {
      if (!dump.empty()) {
        for (const auto& b : builtin_scenarios()) {
          if (b.name == dump) {
            std::cout << b.yaml;
            return 0;
          }
        }
        throw std::runtime_error("unknown built-in scenario '" + dump + "'");
      }
      for (const auto& b : builtin_scenarios()) {
        const auto sw = builtin_sweep(b.name);
        std::cout << fmt::format("{:<12} {:>4} points x {} reps  {}\n", b.name, sw.point_count(), sw.replications,
                                 b.description);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "wpansim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
