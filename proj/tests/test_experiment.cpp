#include <gtest/gtest.h>

#include <sstream>

#include "wpansim/experiment.hpp"

using namespace wpansim;

namespace {

SweepSpec small_sweep() {
  return std::get<SweepSpec>(parse_spec(
      "name: small\nreplications: 3\nseed_base: 5\nbase:\n  mode: nonbeacon\n  quota: 100\n  interval: 0.01\n"
      "axes:\n  - param: n_devices\n    values: [2, 8]\n  - param: msdu\n    values: [20, 100]\n"));
}

std::string csv_of(const ResultsTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace

TEST(RunScenario, SingleDeviceOracle) {
  ScenarioSpec s;
  s.interval = 1.0;
  s.distribution = Distribution::periodic;
  const auto m = run_scenario(s, 1);
  EXPECT_EQ(m.packet_loss_rate, 0.0);
  EXPECT_NEAR(*m.mean_delay, 0.004256, 0.004256 * 0.05);
}

TEST(RunScenario, IdenticalInputsIdenticalRows) {
  ScenarioSpec s;
  s.n_devices = 8;
  s.quota = 500;
  EXPECT_EQ(run_scenario(s, 3), run_scenario(s, 3));
  EXPECT_NE(run_scenario(s, 3), run_scenario(s, 4));
}

TEST(RunSweep, RowOrderAndAggregates) {
  const auto t = run_sweep(small_sweep(), 1);
  ASSERT_EQ(t.rows.size(), 4u * 3u + 4u * 2u);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(t.rows[i].kind, RowKind::run);
    EXPECT_EQ(t.rows[i].point, i / 3);
    EXPECT_EQ(t.rows[i].replication, static_cast<int>(i % 3));
    EXPECT_TRUE(t.rows[i].ok) << t.rows[i].error;
  }
  const auto& mean = t.rows[12];
  const auto& sd = t.rows[13];
  EXPECT_EQ(mean.kind, RowKind::mean);
  EXPECT_EQ(sd.kind, RowKind::stddev);
  EXPECT_EQ(mean.samples, 3);
  const double m = (t.rows[0].packet_loss_rate + t.rows[1].packet_loss_rate + t.rows[2].packet_loss_rate) / 3;
  EXPECT_DOUBLE_EQ(mean.packet_loss_rate, m);
  double ss = 0;
  for (int i = 0; i < 3; ++i) ss += (t.rows[i].packet_loss_rate - m) * (t.rows[i].packet_loss_rate - m);
  EXPECT_NEAR(sd.packet_loss_rate, std::sqrt(ss / 2), 1e-15);
}

TEST(RunSweep, WorkerCountDoesNotChangeBytes) {
  const auto one = csv_of(run_sweep(small_sweep(), 1));
  EXPECT_EQ(one, csv_of(run_sweep(small_sweep(), 3)));
  EXPECT_EQ(one, csv_of(run_sweep(small_sweep(), 8)));
}

TEST(RunSweep, FailedRunIsMarkedAndOthersContinue) {
  auto sweep = small_sweep();
  sweep.base.msdu_cap = 50;  // the msdu = 100 points become invalid
  sweep.replications = 1;
  const auto t = run_sweep(sweep, 2);
  ASSERT_EQ(t.rows.size(), 4u + 8u);
  for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(t.rows[p].ok, p % 2 == 0) << p;
  EXPECT_FALSE(t.rows[4 + 2].ok);  // mean row of a failed point
  const auto text = csv_of(t);
  EXPECT_NE(text.find("failed"), std::string::npos);
  std::istringstream in(text);
  EXPECT_NO_THROW(read_csv(in));
}

TEST(Csv, HeaderTimeColumnsAndNa) {
  ScenarioSpec s;
  s.mode = Mode::beacon;
  s.bo = 7;
  s.so = 1;
  s.n_devices = 1;
  s.interval = 4.9;
  s.distribution = Distribution::periodic;
  s.run_time = 5.0;
  const auto t = run_replications(s, 1, 1, 1);
  const auto text = csv_of(t);
  std::istringstream in(text);
  const auto csv = read_csv(in);
  EXPECT_EQ(csv.header, csv_columns());
  for (const char* c : {"t_start", "t_start_symbols", "t_end", "t_end_symbols", "mean_delay", "mean_delay_symbols"})
    EXPECT_GE(csv.column(c), 0) << c;
  // Either the single packet was delivered or the delay is undefined.
  const auto& row = csv.rows.at(0);
  if (row[static_cast<std::size_t>(csv.column("delivered"))] == "0")
    EXPECT_EQ(row[static_cast<std::size_t>(csv.column("mean_delay"))], "NA");
  EXPECT_EQ(row[static_cast<std::size_t>(csv.column("t_end_symbols"))], "312500");
  EXPECT_EQ(row[static_cast<std::size_t>(csv.column("t_end"))], "5");
}

TEST(PlotData, BlocksPerSeries) {
  std::istringstream in(csv_of(run_sweep(small_sweep(), 1)));
  const auto csv = read_csv(in);
  std::ostringstream os;
  emit_plot_data(os, csv, "msdu", "effective_data_rate", "n_devices");
  const std::string out = os.str();
  EXPECT_EQ(out.rfind("series,x,mean,stddev,n\n", 0), 0u);
  EXPECT_NE(out.find("2,20,"), std::string::npos);
  EXPECT_NE(out.find("\n\n8,20,"), std::string::npos);
  EXPECT_NE(out.find(",3\n"), std::string::npos);
}

TEST(PlotData, EmptyResultsGiveHeaderOnly) {
  std::istringstream empty("");
  std::ostringstream os;
  emit_plot_data(os, read_csv(empty), "max_nb", "mean_delay", "bo_so");
  EXPECT_EQ(os.str(), "series,x,mean,stddev,n\n");

  ResultsTable none;
  std::istringstream header_only(csv_of(none));
  std::ostringstream os2;
  emit_plot_data(os2, read_csv(header_only), "max_nb", "mean_delay", "bo_so");
  EXPECT_EQ(os2.str(), "series,x,mean,stddev,n\n");
}

TEST(PlotData, UnknownColumnsRejected) {
  std::istringstream in(csv_of(run_sweep(small_sweep(), 1)));
  const auto csv = read_csv(in);
  std::ostringstream os;
  EXPECT_THROW(emit_plot_data(os, csv, "MSDU", "effective_data_rate", "n_devices"), std::invalid_argument);
  EXPECT_THROW(emit_plot_data(os, csv, "msdu", "throughput", "n_devices"), std::invalid_argument);
  EXPECT_THROW(emit_plot_data(os, csv, "msdu", "effective_data_rate", "colour"), std::invalid_argument);
}
