#include "radarq/experiment.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "radarq/config.h"

namespace radarq {
namespace {

using namespace std::chrono_literals;
using ::testing::HasSubstr;

std::string sweep_error(const std::string& text) {
  try {
    parse_sweep(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ExperimentTest, ShippedMatrixHasEveryCellOnce) {
  const SweepSpec sweep = load_sweep("experiments/reproduce.json");
  EXPECT_EQ(sweep.output, "results/reproduce.csv");
  ASSERT_EQ(sweep.experiments.size(), 3u);
  EXPECT_EQ(expand(sweep.experiments[0]).size(), 300u);
  EXPECT_EQ(expand(sweep.experiments[1]).size(), 300u);
  EXPECT_EQ(expand(sweep.experiments[2]).size(), 200u);

  const std::vector<SimConfig> cells = expand(sweep);
  ASSERT_EQ(cells.size(), 800u);
  std::set<std::tuple<StrategyKind, TopologyKind, std::int64_t, int, std::uint64_t>>
      keys;
  for (const SimConfig& c : cells) {
    const std::int64_t tco = c.noise.coherence_time ? c.noise.coherence_time->count() : -1;
    EXPECT_TRUE(keys.insert({c.strategy, c.topology.kind, tco, c.concurrency, c.seed}).second);
    EXPECT_EQ(c.duration, 60s);
    EXPECT_EQ(c.warmup, 5s);
    EXPECT_TRUE(validate_config(c).empty());
  }
}

TEST(ExperimentTest, ExpansionOrderIsStrategyTopologyCoherenceNSeed) {
  const SweepSpec sweep = parse_sweep(R"({
    "strategies": ["radar-q", "asynch-root"],
    "topologies": [{"kind": "grid"}, {"kind": "random"}],
    "coherence_times": ["inf", 0.1],
    "N": [1, 2],
    "seeds": 2,
    "first_seed": 10
  })");
  const std::vector<SimConfig> cells = expand(sweep);
  ASSERT_EQ(cells.size(), 32u);
  EXPECT_EQ(cells[0].seed, 10u);
  EXPECT_EQ(cells[1].seed, 11u);
  EXPECT_EQ(cells[1].concurrency, 1);
  EXPECT_EQ(cells[2].concurrency, 2);
  EXPECT_FALSE(cells[3].noise.coherence_time.has_value());
  EXPECT_EQ(cells[4].noise.coherence_time, Duration(100ms));
  EXPECT_EQ(cells[7].topology.kind, TopologyKind::kGrid);
  EXPECT_EQ(cells[8].topology.kind, TopologyKind::kRandom);
  EXPECT_EQ(cells[15].strategy, StrategyKind::kRadarQ);
  EXPECT_EQ(cells[16].strategy, StrategyKind::kAsynchRoot);
}

TEST(ExperimentTest, BaseAppliesToEveryCell) {
  const SweepSpec sweep = parse_sweep(R"({
    "base": {"duration": 2, "warmup": 0.5, "noise": {"gen_prob": 0.6}},
    "N": [3, 4]
  })");
  for (const SimConfig& c : expand(sweep)) {
    EXPECT_EQ(c.duration, 2s);
    EXPECT_DOUBLE_EQ(c.noise.gen_prob, 0.6);
  }
  EXPECT_EQ(expand(sweep).size(), 10u);
}

TEST(ExperimentTest, FilterKeepsMatchingCells) {
  const SweepSpec sweep = load_sweep("experiments/reproduce.json");
  SweepFilter f;
  f.strategies = {StrategyKind::kSynchNca};
  f.topologies = {"random"};
  f.concurrency = {4, 5};
  f.coherence_times = {CoherenceTime{Duration(100ms)}};
  const std::vector<SimConfig> cells = expand(sweep, f);
  ASSERT_EQ(cells.size(), 10u);
  for (const SimConfig& c : cells) {
    EXPECT_EQ(c.strategy, StrategyKind::kSynchNca);
    EXPECT_EQ(c.topology.kind, TopologyKind::kRandom);
  }
}

TEST(ExperimentTest, SeedOverrideCollapsesTheSeedRange) {
  const SweepSpec sweep = load_sweep("experiments/reproduce.json");
  SweepFilter f;
  f.seed = 77;
  f.strategies = {StrategyKind::kRadarQ};
  f.coherence_times = {std::nullopt};
  const std::vector<SimConfig> cells = expand(sweep, f);
  EXPECT_EQ(cells.size(), 20u);
  for (const SimConfig& c : cells) EXPECT_EQ(c.seed, 77u);
}

TEST(ExperimentTest, ParseErrorsNameTheField) {
  EXPECT_THAT(sweep_error("{"), HasSubstr("invalid JSON"));
  EXPECT_THAT(sweep_error(R"({"N": []})"), HasSubstr("N"));
  EXPECT_THAT(sweep_error(R"({"N": [0]})"), HasSubstr("concurrency"));
  EXPECT_THAT(sweep_error(R"({"strategies": ["fast"]})"), HasSubstr("strategies"));
  EXPECT_THAT(sweep_error(R"({"sedes": 3})"), HasSubstr("sedes"));
  EXPECT_THAT(sweep_error(R"({"experiments": [{"seeds": 0}]})"),
              HasSubstr("experiments[0].seeds"));
  EXPECT_THAT(sweep_error(R"({"experiments": [{}], "extra": 1})"), HasSubstr("extra"));
  EXPECT_THAT(sweep_error(R"({"base": {"weights": {"alpha": 0}}})"),
              HasSubstr("weights.alpha"));
}

TEST(ExperimentTest, RunCellsPreservesOrderAndMatchesSerialRuns) {
  SweepSpec sweep = parse_sweep(R"({
    "base": {"duration": 1, "warmup": 0.1},
    "strategies": ["radar-q", "synch-nca", "asynch-root"],
    "N": [2, 5],
    "seeds": 1
  })");
  const std::vector<SimConfig> cells = expand(sweep);
  std::size_t calls = 0;
  const std::vector<MetricsRecord> parallel =
      run_cells(cells, 3, [&](std::size_t done, std::size_t total) {
        ++calls;
        EXPECT_LE(done, total);
      });
  ASSERT_EQ(parallel.size(), cells.size());
  EXPECT_EQ(calls, cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(parallel[i], run(cells[i]));
  }
}

TEST(ExperimentTest, CsvHasHeaderAndOneRowPerRecord) {
  MetricsRecord r;
  r.config = {"radar-q", "grid", 10, 10, 1, std::nullopt, 1};
  std::ostringstream out;
  write_csv(out, {r, r});
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], csv_header());
  EXPECT_EQ(lines[1], csv_row(r));
}

}  // namespace
}  // namespace radarq
