#include <gtest/gtest.h>

#include <set>

#include "wpansim/experiment.hpp"
#include "wpansim/scenario.hpp"

using namespace wpansim;

namespace {

const std::string kDir = std::string(WPANSIM_SOURCE_DIR) + "/scenarios/";

int error_line(const std::string& text) {
  try {
    parse_spec(text, "t.yaml");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("t.yaml:"), std::string::npos) << e.what();
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return -1;
}

}  // namespace

TEST(DefaultsFiles, NonBeacon) {
  const auto spec = std::get<ScenarioSpec>(load_scenario(kDir + "nonbeacon-defaults.yaml"));
  EXPECT_EQ(spec.mode, Mode::nonbeacon);
  EXPECT_EQ(spec.interval, 0.025);
  EXPECT_EQ(spec.msdu, 60);
  EXPECT_EQ(spec.min_be, 3);
  EXPECT_EQ(spec.max_nb, 4);
  EXPECT_EQ(spec.max_frame_retries, 3);
  EXPECT_EQ(spec.quota, 5000);
}

TEST(DefaultsFiles, Beacon) {
  const auto spec = std::get<ScenarioSpec>(load_scenario(kDir + "beacon-defaults.yaml"));
  EXPECT_EQ(spec.mode, Mode::beacon);
  EXPECT_EQ(spec.n_devices, 8);
  EXPECT_EQ(spec.interval, 0.05);
  EXPECT_EQ(spec.bo, 7);
  EXPECT_EQ(spec.so, 6);
  EXPECT_EQ(spec.run_time, 1000.0);
}

TEST(Errors, SoAboveBoIsRejectedAtItsLine) {
  EXPECT_EQ(error_line("mode: beacon\nbo: 7\nso: 8\n"), 3);
}

TEST(Errors, UnknownKey) { EXPECT_EQ(error_line("mode: nonbeacon\nmsdu: 60\nmsdu_size: 60\n"), 3); }

TEST(Errors, ModeMismatch) {
  EXPECT_EQ(error_line("mode: nonbeacon\nbo: 7\n"), 2);
  EXPECT_EQ(error_line("mode: beacon\nquota: 10\n"), 2);
}

TEST(Errors, RangeViolations) {
  EXPECT_EQ(error_line("max_nb: 6\n"), 1);
  EXPECT_EQ(error_line("n_devices: 2\nmin_be: 6\n"), 2);
  EXPECT_EQ(error_line("max_frame_retries: 8\n"), 1);
  EXPECT_EQ(error_line("msdu: 119\n"), 1);
  EXPECT_EQ(error_line("\ninterval: -1\n"), 2);
  EXPECT_EQ(error_line("mode: beacon\nbo: 15\nso: 1\n"), 2);
}

TEST(Errors, BadValuesAndSyntax) {
  EXPECT_EQ(error_line("msdu: sixty\n"), 1);
  EXPECT_EQ(error_line("n_devices: 2.5\n"), 1);
  EXPECT_EQ(error_line("mode: sideways\n"), 1);
  EXPECT_EQ(error_line("msdu: 60\n  bad: [\n"), 2);
  EXPECT_EQ(error_line("- 1\n- 2\n"), 1);
}

TEST(Errors, MissingFile) { EXPECT_THROW(load_scenario(kDir + "nope.yaml"), ConfigError); }

TEST(Sweep, AxisErrors) {
  const std::string base = "base:\n  mode: nonbeacon\naxes:\n";
  EXPECT_EQ(error_line(base + "  - param: colour\n    values: [1]\n"), 5);
  EXPECT_EQ(error_line(base + "  - param: max_nb\n    values: [0, 9]\n"), 5);
  EXPECT_EQ(error_line(base + "  - param: bo\n    values: [3]\n"), 5);
  EXPECT_EQ(error_line(base + "  - param: n_devices\n    values: []\n"), 4);
  EXPECT_EQ(error_line("base:\n  mode: nonbeacon\naxes: []\nextra: 1\n"), 4);
}

TEST(Sweep, CartesianOrderAndSeeds) {
  const auto sweep = std::get<SweepSpec>(parse_spec(
      "replications: 3\nseed_base: 9\nbase:\n  mode: nonbeacon\naxes:\n"
      "  - param: n_devices\n    values: [2, 4]\n  - param: msdu\n    values: [20, 40, 60]\n"));
  ASSERT_EQ(sweep.point_count(), 6u);
  EXPECT_EQ(sweep.point(0).n_devices, 2);
  EXPECT_EQ(sweep.point(0).msdu, 20);
  EXPECT_EQ(sweep.point(2).msdu, 60);
  EXPECT_EQ(sweep.point(3).n_devices, 4);
  EXPECT_EQ(sweep.point(3).msdu, 20);
  EXPECT_THROW(sweep.point(6), std::out_of_range);
  std::set<std::uint64_t> seeds;
  for (std::size_t p = 0; p < sweep.point_count(); ++p)
    for (int r = 0; r < sweep.replications; ++r) seeds.insert(sweep.seed_for(p, r));
  EXPECT_EQ(seeds.size(), 18u);
}

TEST(Sweep, PairAxis) {
  ScenarioSpec s;
  s.mode = Mode::beacon;
  apply_axis(s, "bo_so", {3, 2});
  EXPECT_EQ(s.bo, 3);
  EXPECT_EQ(s.so, 2);
  EXPECT_THROW(apply_axis(s, "bo_so", {3, std::nullopt}), std::invalid_argument);
  EXPECT_THROW(apply_axis(s, "msdu", {40, 2}), std::invalid_argument);
  EXPECT_THROW(apply_axis(s, "msdu", {40.5, std::nullopt}), std::invalid_argument);
  ScenarioSpec nb;
  EXPECT_THROW(apply_axis(nb, "bo_so", {3, 2}), std::invalid_argument);
}

TEST(RoundTrip, DefaultsFiles) {
  for (const char* f : {"nonbeacon-defaults.yaml", "beacon-defaults.yaml"}) {
    const auto a = std::get<ScenarioSpec>(load_scenario(kDir + f));
    const auto b = std::get<ScenarioSpec>(parse_spec(serialize(a)));
    EXPECT_EQ(a, b) << f;
  }
}

TEST(RoundTrip, BuiltinSweeps) {
  ASSERT_EQ(builtin_scenarios().size(), 8u);
  for (const auto& b : builtin_scenarios()) {
    const auto a = builtin_sweep(b.name);
    const auto text = serialize(a);
    const auto back = std::get<SweepSpec>(parse_spec(text));
    EXPECT_EQ(a, back) << b.name;
    EXPECT_EQ(text, serialize(back));
    EXPECT_GE(a.replications, 5);
    const auto file = std::get<SweepSpec>(load_scenario(kDir + "builtin/" + b.name + ".yaml"));
    EXPECT_EQ(file, a);
  }
}

TEST(RoundTrip, AwkwardDoubles) {
  ScenarioSpec s;
  s.interval = 0.1 + 0.2;
  s.radius = 1.0 / 3.0;
  EXPECT_EQ(std::get<ScenarioSpec>(parse_spec(serialize(s))), s);
}

TEST(Builtins, ShapesMatchTheExperiments) {
  EXPECT_EQ(builtin_sweep("s6-maxnb").point_count(), 6u * 5u);
  const auto so = builtin_sweep("s7-so");
  for (std::size_t p = 0; p < so.point_count(); ++p) EXPECT_EQ(so.point(p).bo, 7);
  const auto bo = builtin_sweep("s7-bo");
  for (std::size_t p = 0; p < bo.point_count(); ++p) EXPECT_EQ(bo.point(p).so, 1);
  const auto pairs = builtin_sweep("s7-maxnb");
  for (std::size_t p = 0; p < pairs.point_count(); ++p) {
    const auto s = pairs.point(p);
    EXPECT_EQ(duty_cycle(s.bo, s.so), 0.5);
  }
  EXPECT_THROW(builtin_sweep("s8-nothing"), std::invalid_argument);
}
