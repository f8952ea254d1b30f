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

// Simulated-user benchmark: every strategy is run against the same set of
// users (one unit-norm omega* each), who rank queries by sampling from the
// Plackett-Luce model. Alignment, quality and regret are recorded after every
// ranking and summarized as mean curves, standard errors and AUCs.

#ifndef CMAESIG_SIMULATION_H_
#define CMAESIG_SIMULATION_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cmaesig/belief.h"
#include "cmaesig/feature_pool.h"
#include "cmaesig/query_strategy.h"

namespace cmaesig {

enum class Metric { kAlignment = 0, kRegret = 1, kQuality = 2 };
inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::kAlignment, Metric::kRegret,
                                                      Metric::kQuality};
std::string_view metric_name(Metric m);

struct SimulationConfig {
  std::vector<std::size_t> dims = {8, 16, 32};
  std::vector<StrategyKind> strategies = {StrategyKind::kInfoGain, StrategyKind::kCmaEs,
                                          StrategyKind::kCmaEsIg};
  std::size_t users = 100;
  std::size_t iterations = 30;  // T
  std::size_t query_size = 4;   // K
  std::size_t candidates = 1000;
  std::size_t posterior_samples = 100;
  double beta = ChoiceModel::kDefaultBeta;
  double sigma0 = 0.5;
  double feature_low = -1.0;
  double feature_high = 1.0;
  std::size_t pool_size = FeaturePool::kDefaultSyntheticCount;
  SamplerConfig sampler;
  bool surrogate_rank = false;
  IgEstimator ig_estimator = IgEstimator::kRanking;
  CandidateSelector selector = CandidateSelector::kGreedyIg;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: one per hardware thread

  void validate() const;
  StrategyConfig strategy_config(StrategyKind kind, std::size_t d) const;
};

struct SimulatedUser {
  WeightVector omega_star;  // unit norm
  double beta = ChoiceModel::kDefaultBeta;

  // Direction uniform on the sphere.
  static SimulatedUser sample(std::size_t d, double beta, Rng& rng);
};

struct EpisodeResult {
  StrategyKind strategy = StrategyKind::kCmaEsIg;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> alignment;
  std::vector<double> quality;
  std::vector<double> regret;

  const std::vector<double>& curve(Metric m) const;
  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

// T rounds of: generate query, user ranks it, belief observes, optimizer
// receives feedback, metrics recorded. Fully determined by `seed`.
EpisodeResult run_episode(const StrategyConfig& strategy, const SamplerConfig& sampler,
                          const SimulatedUser& user, std::shared_ptr<const FeaturePool> pool,
                          std::size_t iterations, std::uint64_t seed);

struct CurveSummary {
  std::vector<double> mean;
  std::vector<double> std_error;  // standard error of the mean across users
  double auc = 0.0;               // mean of the per-iteration means
};

struct BenchmarkCell {
  StrategyKind strategy = StrategyKind::kCmaEsIg;
  std::size_t dim = 0;
  std::array<CurveSummary, 3> metrics;  // indexed by Metric
  std::vector<EpisodeResult> episodes;  // one per user, in user order

  const CurveSummary& summary(Metric m) const { return metrics[static_cast<int>(m)]; }
};

struct BenchmarkReport {
  SimulationConfig config;
  std::vector<BenchmarkCell> cells;  // strategy-major, then dims in config order

  // Throws std::out_of_range if the pair was not run.
  const BenchmarkCell& cell(StrategyKind kind, std::size_t d) const;
};

// Synthetic pool used for dimension d under `config`'s seed.
std::shared_ptr<const FeaturePool> simulation_pool(const SimulationConfig& config, std::size_t d);
SimulatedUser simulation_user(const SimulationConfig& config, std::size_t d, std::size_t user);

BenchmarkReport run_benchmark(const SimulationConfig& config);

// 10 log-spaced step sizes from 0.01 to 1.5 inclusive.
std::vector<double> default_sigma_grid();

struct SweepReport {
  std::vector<double> sigmas;
  std::vector<BenchmarkReport> reports;  // parallel to sigmas
};

// run_benchmark once per initial step size. Throws std::invalid_argument on
// a non-positive sigma.
SweepReport run_sigma_sweep(const SimulationConfig& base, std::span<const double> sigmas);

// Ordinary least-squares slope of each user's curve against t, averaged
// across users, with a normal-approximation 95% interval.
struct SlopeEstimate {
  double slope = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool contains_zero() const { return low <= 0.0 && 0.0 <= high; }
};
SlopeEstimate slope_interval(const BenchmarkCell& cell, Metric metric);

// curves.csv: strategy,d,t,metric,mean,stderr (t starts at 1)
void write_curves_csv(std::ostream& out, const BenchmarkReport& report);
// auc.csv: strategy,d,metric,auc
void write_auc_csv(std::ostream& out, const BenchmarkReport& report);
// sweep.csv: sigma,strategy,d,metric,auc
void write_sweep_csv(std::ostream& out, const SweepReport& sweep);
// Strategy rows; Alignment, Regret and Quality column groups by dimension.
void print_auc_table(std::ostream& out, const BenchmarkReport& report);

}  // namespace cmaesig

#endif  // CMAESIG_SIMULATION_H_
