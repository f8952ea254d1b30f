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

// One interactive preference-elicitation session: query out, ranking in,
// belief and optimizer updated, favorite and predicted best on request.
//
// State is derived from the event sequence only. Each mutation is validated,
// turned into an Event, handed to the sink (which persists it) and then
// applied, so a session rebuilt from its log by replay() is bit-identical to
// the live one.

#ifndef CMAESIG_SERVICE_SESSION_H_
#define CMAESIG_SERVICE_SESSION_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmaesig/belief.h"
#include "cmaesig/feature_pool.h"
#include "cmaesig/information_gain.h"
#include "cmaesig/query_strategy.h"
#include "cmaesig/service/event_log.h"

namespace cmaesig::service {

// Where a session's items come from.
struct PoolSpec {
  // Named dataset registered with the session manager; empty for synthetic.
  std::string dataset;
  // Synthetic pool: `size` uniform vectors in [low, high]^dim.
  std::size_t dim = 8;
  std::size_t size = FeaturePool::kDefaultSyntheticCount;
  double low = -1.0;
  double high = 1.0;
  std::uint64_t seed = 0;

  bool synthetic() const { return dataset.empty(); }
};

// Request fields use the CLI flag names: strategy, d, K, D, M, beta,
// sigma0, seed, dataset, pool_size, pool_seed, low, high, surrogate_rank,
// ig_estimator, sampler.
struct SessionConfig {
  StrategyKind strategy = StrategyKind::kCmaEsIg;
  std::size_t query_size = 4;
  std::size_t candidates = 1000;
  std::size_t posterior_samples = 100;
  double beta = ChoiceModel::kDefaultBeta;
  double sigma0 = 0.5;
  bool surrogate_rank = false;
  IgEstimator ig_estimator = IgEstimator::kRanking;
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  PoolSpec pool;

  // Throws ServiceError(kInvalidArgument) naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
  // Missing keys keep their defaults. Throws ServiceError(kInvalidArgument)
  // on unknown keys or wrongly typed values.
  static SessionConfig from_json(const nlohmann::json& j);
};

struct IssuedQuery {
  std::uint64_t query_id = 0;  // 1-based issue order
  Query query;
};

class Session {
 public:
  using Sink = std::function<void(const Event&)>;

  // Emits the create event. `pool` must match `config.pool`.
  static Session create(std::string id, SessionConfig config,
                        std::shared_ptr<const FeaturePool> pool, const Sink& sink);

  // Rebuilds a session from its events. Query events are regenerated from
  // their logged seeds and compared with the logged item ids. Throws
  // ServiceError(kCorruptLog) on any mismatch.
  static Session replay(const SessionLog& log,
                        const std::function<std::shared_ptr<const FeaturePool>(const PoolSpec&)>&
                            resolve_pool);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }
  const FeaturePool& pool() const { return *pool_; }
  const Belief& belief() const { return belief_; }
  const QueryStrategy& strategy() const { return strategy_; }
  std::uint64_t next_seq() const { return next_seq_; }
  std::size_t rankings() const { return rankings_; }
  std::uint64_t queries_issued() const { return issued_; }
  const std::optional<IssuedQuery>& pending() const { return pending_; }
  const std::optional<std::string>& favorite() const { return favorite_; }
  const std::string& created_at() const { return created_at_; }

  // The pending query, generating (and logging) one if none is pending.
  const IssuedQuery& query(const Sink& sink);

  // `order` lists query positions best first. With `query_id`, the ranking
  // must target that query. Errors: kNoPendingQuery if nothing has been
  // issued, kDoubleSubmission if the targeted (or latest) query was already
  // ranked, kInvalidRanking if `order` is not a permutation of the query.
  // State is unchanged on error.
  void submit_ranking(const std::vector<std::size_t>& order, std::optional<std::uint64_t> query_id,
                      const Sink& sink);
  // Same, with item ids instead of positions.
  void submit_ranking_ids(const std::vector<std::string>& order,
                          std::optional<std::uint64_t> query_id, const Sink& sink);

  // Errors: kItemNotDisplayed if the id never appeared in a query.
  void set_favorite(const std::string& item_id, const Sink& sink);

  // Pool index maximizing the estimated reward; ties to the lowest index.
  std::size_t predicted_best() const;

  // Hex FNV-1a over particles, optimizer state, pending query, favorite and
  // ranking count.
  std::string digest() const;

 private:
  Session(std::string id, SessionConfig config, std::shared_ptr<const FeaturePool> pool);

  Event make_event(EventType type) const;
  Query generate(std::uint64_t seed);
  void apply_ranking(const Ranking& ranking);

  std::string id_;
  SessionConfig config_;
  std::shared_ptr<const FeaturePool> pool_;
  Belief belief_;
  QueryStrategy strategy_;
  std::optional<IssuedQuery> pending_;
  std::uint64_t issued_ = 0;
  std::size_t rankings_ = 0;
  std::unordered_set<std::string> displayed_;
  std::optional<std::string> favorite_;
  std::uint64_t next_seq_ = 0;
  std::string created_at_;
};

}  // namespace cmaesig::service

#endif  // CMAESIG_SERVICE_SESSION_H_
