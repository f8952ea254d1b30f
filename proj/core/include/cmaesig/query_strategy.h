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

#ifndef CMAESIG_QUERY_STRATEGY_H_
#define CMAESIG_QUERY_STRATEGY_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cmaesig/belief.h"
#include "cmaesig/cma_es.h"
#include "cmaesig/feature_pool.h"
#include "cmaesig/information_gain.h"
#include "cmaesig/types.h"

namespace cmaesig {

enum class StrategyKind { kInfoGain, kCmaEs, kCmaEsIg };

// "IG", "CMA-ES", "CMA-ES-IG".
std::string_view strategy_name(StrategyKind kind);
// Accepts the names above case-insensitively, plus "infogain"/"cmaes"/"cmaes-ig".
// Throws std::invalid_argument otherwise.
StrategyKind parse_strategy(std::string_view name);

// How CMA-ES-IG reduces its D candidates to a K-item query.
//   kGreedyIg: greedy information-gain maximization under posterior samples
//   kMedoids:  k-medoids of the candidates in feature space
enum class CandidateSelector { kGreedyIg, kMedoids };
std::string_view selector_name(CandidateSelector s);
// "greedy-ig" or "medoids"; throws std::invalid_argument otherwise.
CandidateSelector parse_selector(std::string_view name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kCmaEsIg;
  std::size_t query_size = 4;           // K
  std::size_t candidates = 1000;        // D
  std::size_t posterior_samples = 100;  // M
  double sigma0 = 0.5;
  double beta = ChoiceModel::kDefaultBeta;
  Bounds bounds;
  // CMA-ES-IG only: update the optimizer from a standard-size population
  // (the first 4 + floor(3 ln d) of the D candidates) ranked by the
  // posterior-mean reward instead of from the K user-ranked items.
  bool surrogate_rank = false;
  // Objective of the greedy IG query builder.
  IgEstimator ig_estimator = IgEstimator::kRanking;
  CandidateSelector selector = CandidateSelector::kGreedyIg;

  // Throws std::invalid_argument for K < 2, D < K, M == 0, sigma0 <= 0,
  // malformed bounds, or a ranking-IG objective over more than
  // kMaxRankingIgItems items.
  void validate() const;
  std::size_t dim() const { return bounds.dim(); }
};

// Query generation state for one session or simulated episode.
//
// Without pool snapping, CMA-ES queries carry the clipped sampled vectors
// themselves and are named "q<n>-<i>". With snapping every generated vector
// is replaced by its nearest unused pool item. IG always draws its
// candidates from the pool.
class QueryStrategy {
 public:
  // Throws std::invalid_argument if the config is invalid or the pool
  // dimension differs from the bounds.
  QueryStrategy(StrategyConfig config, std::shared_ptr<const FeaturePool> pool,
                bool snap_to_pool);

  const StrategyConfig& config() const { return config_; }
  StrategyKind kind() const { return config_.kind; }
  const std::optional<CmaState>& cma() const { return cma_; }
  const FeaturePool& pool() const { return *pool_; }
  bool snaps_to_pool() const { return snap_; }
  std::size_t queries_issued() const { return issued_; }
  // Information gain of the most recent CMA-ES-IG or IG query under the
  // posterior samples used to build it.
  double last_information_gain() const { return last_ig_; }

  Query next_query(const Belief& belief, Rng& rng);

  // Greedy IG over D pool items drawn without replacement. Throws
  // std::invalid_argument if the pool has fewer than K items.
  Query next_query_ig(const Belief& belief, Rng& rng);
  // K clipped draws from N(m, sigma^2 C).
  Query next_query_cma(Rng& rng);
  // D clipped draws from N(m, sigma^2 C) reduced to K items by the
  // configured selector.
  Query next_query_cma_ig(const Belief& belief, Rng& rng);

  // Applies the user's ranking of `query` to the optimizer. `updated` is the
  // belief after observing the ranking. No-op for IG. Throws
  // std::invalid_argument if the ranking does not fit the query.
  void feedback(const Query& query, const Ranking& ranking, const Belief& updated);

 private:
  Query make_query(const Matrix& rows, std::span<const std::size_t> picks);

  StrategyConfig config_;
  std::shared_ptr<const FeaturePool> pool_;
  bool snap_;
  std::optional<CmaState> cma_;
  std::size_t issued_ = 0;
  double last_ig_ = 0.0;
  Matrix last_candidates_;
};

}  // namespace cmaesig

#endif  // CMAESIG_QUERY_STRATEGY_H_
