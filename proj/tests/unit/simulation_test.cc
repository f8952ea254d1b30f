// Copyright 2026 The cmaesig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmaesig/simulation.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

namespace cmaesig {
namespace {

SimulationConfig small_config() {
  SimulationConfig c;
  c.dims = {3};
  c.users = 3;
  c.iterations = 4;
  c.candidates = 50;
  c.posterior_samples = 20;
  c.pool_size = 300;
  c.sampler.burn_in = 50;
  c.sampler.particles = 30;
  c.seed = 7;
  c.threads = 1;
  return c;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

TEST(SimulatedUser, UnitNorm) {
  Rng rng(1);
  for (std::size_t d : {1u, 2u, 8u, 32u}) {
    EXPECT_NEAR(SimulatedUser::sample(d, 1.0, rng).omega_star.norm(), 1.0, 1e-12);
  }
}

TEST(RunEpisode, ZeroIterationsAndDeterminism) {
  const auto c = small_config();
  const auto pool = simulation_pool(c, 3);
  const auto user = simulation_user(c, 3, 0);
  const auto sc = c.strategy_config(StrategyKind::kCmaEsIg, 3);
  const auto empty = run_episode(sc, c.sampler, user, pool, 0, 1);
  EXPECT_TRUE(empty.alignment.empty() && empty.quality.empty() && empty.regret.empty());

  const auto a = run_episode(sc, c.sampler, user, pool, 6, 99);
  const auto b = run_episode(sc, c.sampler, user, pool, 6, 99);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.alignment.size(), 6u);
  for (double v : a.alignment) EXPECT_TRUE(v >= -1.0 && v <= 1.0);
  for (double v : a.regret) EXPECT_GE(v, 0.0);
  EXPECT_NE(a, run_episode(sc, c.sampler, user, pool, 6, 100));
}

TEST(RunEpisode, NearNoiselessUserIsIdentifiedByInfoGain) {
  SimulationConfig c;
  c.dims = {2};
  c.pool_size = 2000;
  const auto pool = simulation_pool(c, 2);
  std::vector<double> finals;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    SimulatedUser user = SimulatedUser::sample(2, 100.0, rng);
    const auto e = run_episode(c.strategy_config(StrategyKind::kInfoGain, 2), c.sampler, user,
                               pool, 30, seed);
    finals.push_back(e.alignment.back());
  }
  std::nth_element(finals.begin(), finals.begin() + 10, finals.end());
  EXPECT_GE(finals[10], 0.9);
}

TEST(RunBenchmark, CellsArePairedAndThreadIndependent) {
  auto c = small_config();
  c.dims = {2, 3};
  const auto report = run_benchmark(c);
  ASSERT_EQ(report.cells.size(), 6u);
  EXPECT_EQ(report.cells[0].strategy, StrategyKind::kInfoGain);
  EXPECT_EQ(report.cells[0].dim, 2u);
  EXPECT_EQ(report.cells[1].dim, 3u);
  for (const auto& cell : report.cells) {
    ASSERT_EQ(cell.episodes.size(), 3u);
    for (auto m : kAllMetrics) {
      EXPECT_EQ(cell.summary(m).mean.size(), 4u);
      EXPECT_TRUE(std::isfinite(cell.summary(m).auc));
    }
    EXPECT_GE(cell.summary(Metric::kAlignment).auc, -1.0);
    EXPECT_LE(cell.summary(Metric::kAlignment).auc, 1.0);
  }
  // The same user faces every strategy.
  EXPECT_EQ(simulation_user(c, 3, 1).omega_star, simulation_user(c, 3, 1).omega_star);
  EXPECT_NE(simulation_user(c, 3, 1).omega_star, simulation_user(c, 3, 2).omega_star);

  c.threads = 3;
  const auto threaded = run_benchmark(c);
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    EXPECT_EQ(report.cells[i].episodes, threaded.cells[i].episodes);
  }
  EXPECT_THROW(report.cell(StrategyKind::kCmaEs, 16), std::out_of_range);
  EXPECT_EQ(&report.cell(StrategyKind::kCmaEs, 3), &report.cells[3]);
}

TEST(RunBenchmark, AucIsMeanOfMeanCurve) {
  const auto report = run_benchmark(small_config());
  for (const auto& cell : report.cells) {
    for (auto m : kAllMetrics) {
      double mean = 0.0;
      for (const auto& e : cell.episodes) {
        for (double v : e.curve(m)) mean += v;
      }
      mean /= static_cast<double>(cell.episodes.size() * 4);
      EXPECT_NEAR(cell.summary(m).auc, mean, 1e-12);
    }
  }
}

TEST(SimulationConfig, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.users = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.dims.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.query_size = 8;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(CsvOutput, LayoutAndCardinality) {
  auto c = small_config();
  c.dims = {2, 3};
  const auto report = run_benchmark(c);
  std::ostringstream curves, aucs, table;
  write_curves_csv(curves, report);
  write_auc_csv(aucs, report);
  print_auc_table(table, report);
  EXPECT_EQ(curves.str().substr(0, curves.str().find('\n')), "strategy,d,t,metric,mean,stderr");
  EXPECT_EQ(aucs.str().substr(0, aucs.str().find('\n')), "strategy,d,metric,auc");
  EXPECT_EQ(count_lines(curves.str()), 1 + 3 * 2 * 4 * 3u);
  EXPECT_EQ(count_lines(aucs.str()), 1 + 3 * 2 * 3u);
  EXPECT_NE(curves.str().find("\nIG,2,1,alignment,"), std::string::npos);
  EXPECT_NE(table.str().find("CMA-ES-IG"), std::string::npos);
  EXPECT_NE(table.str().find("d=3"), std::string::npos);
}

TEST(SigmaGrid, TenLogSpacedValues) {
  const auto grid = default_sigma_grid();
  ASSERT_EQ(grid.size(), 10u);
  EXPECT_EQ(grid.front(), 0.01);
  EXPECT_EQ(grid.back(), 1.5);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_GT(grid[i], grid[i - 1]);
    EXPECT_NEAR(grid[i] / grid[i - 1], std::pow(150.0, 1.0 / 9.0), 1e-9);
  }
}

TEST(SigmaSweep, RowsEchoTheGrid) {
  auto c = small_config();
  c.strategies = {StrategyKind::kCmaEs, StrategyKind::kCmaEsIg};
  c.users = 2;
  c.iterations = 2;
  const std::vector<double> sigmas = {0.01, 0.3, 1.5};
  const auto sweep = run_sigma_sweep(c, sigmas);
  ASSERT_EQ(sweep.reports.size(), 3u);
  EXPECT_EQ(sweep.sigmas, sigmas);
  EXPECT_EQ(sweep.reports[1].config.sigma0, 0.3);
  std::ostringstream out;
  write_sweep_csv(out, sweep);
  EXPECT_EQ(count_lines(out.str()), 1 + 3 * 2 * 1 * 3u);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sigma,strategy,d,metric,auc");
  std::set<std::string> seen;
  while (std::getline(in, line)) seen.insert(line.substr(0, line.find(',')));
  EXPECT_EQ(seen, (std::set<std::string>{"0.01", "0.3", "1.5"}));
  const std::vector<double> bad = {0.1, 0.0};
  EXPECT_THROW(run_sigma_sweep(c, bad), std::invalid_argument);
}

TEST(SlopeInterval, RecoversLinearTrend) {
  BenchmarkCell cell;
  for (int u = 0; u < 10; ++u) {
    EpisodeResult e;
    for (int t = 1; t <= 30; ++t) e.quality.push_back(0.02 * t + 0.1 * u + (t % 2 ? 0.01 : -0.01));
    cell.episodes.push_back(e);
  }
  const auto s = slope_interval(cell, Metric::kQuality);
  EXPECT_NEAR(s.slope, 0.02, 1e-3);
  EXPECT_FALSE(s.contains_zero());
  EXPECT_LE(s.low, s.slope);
  EXPECT_GE(s.high, s.slope);
}

}  // namespace
}  // namespace cmaesig
