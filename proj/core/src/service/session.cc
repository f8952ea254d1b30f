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

#include "cmaesig/service/session.h"

#include <algorithm>
#include <cmath>

#include "cmaesig/format.h"
#include "cmaesig/information_gain.h"
#include "cmaesig/service/errors.h"

namespace cmaesig::service {

namespace {

// Independent rng streams derived from the session seed.
constexpr std::uint64_t kQueryStream = 1;
constexpr std::uint64_t kBeliefStream = 2;

[[noreturn]] void invalid(const std::string& what) {
  throw ServiceError(ErrorCode::kInvalidArgument, what);
}

std::string pool_digest(const FeaturePool& pool) {
  Digest h;
  for (const auto& item : pool.items()) {
    h.add(item.id);
    h.add(item.features);
  }
  return h.hex();
}

IgEstimator estimator_from_json(const std::string& s) {
  if (s != "ranking" && s != "first-choice") {
    invalid("ig_estimator must be \"ranking\" or \"first-choice\"");
  }
  return parse_estimator(s);
}

StrategyConfig strategy_config(const SessionConfig& c, const FeaturePool& pool) {
  StrategyConfig s;
  s.kind = c.strategy;
  s.query_size = c.query_size;
  s.candidates = c.candidates;
  s.posterior_samples = c.posterior_samples;
  s.sigma0 = c.sigma0;
  s.beta = c.beta;
  s.bounds = pool.bounds();
  s.surrogate_rank = c.surrogate_rank;
  s.ig_estimator = c.ig_estimator;
  return s;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

// Non-negative integer; small literals may be tagged as signed.
std::uint64_t get_seed(const nlohmann::json& j, const char* key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    invalid(std::string("field '") + key + "' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::size_t get_count(const nlohmann::json& j, const char* key) {
  return static_cast<std::size_t>(get_seed(j, key));
}

double get_real(const nlohmann::json& j, const char* key) {
  if (!j.is_number()) invalid(std::string("field '") + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(std::string("field '") + key + "' must be finite");
  return v;
}

}  // namespace

void SessionConfig::validate() const {
  // Caps keep a single request from allocating unbounded memory.
  constexpr std::size_t kMaxDim = 4096;
  constexpr std::size_t kMaxCount = 1'000'000;
  if (query_size < 2) invalid("K must be at least 2");
  if (query_size > 64) invalid("K must be at most 64");
  if (candidates > kMaxCount) invalid("D must be at most " + std::to_string(kMaxCount));
  if (posterior_samples > kMaxCount) invalid("M must be at most " + std::to_string(kMaxCount));
  if (sampler.particles > kMaxCount || sampler.burn_in > kMaxCount || sampler.thinning > kMaxCount) {
    invalid("sampler counts must be at most " + std::to_string(kMaxCount));
  }
  if (candidates < query_size) invalid("D must be at least K");
  if (posterior_samples == 0) invalid("M must be at least 1");
  if (!(sigma0 > 0.0)) invalid("sigma0 must be positive");
  if (!(beta >= 0.0)) invalid("beta must be non-negative");
  if (strategy == StrategyKind::kInfoGain && ig_estimator == IgEstimator::kRanking &&
      query_size > kMaxRankingIgItems) {
    invalid("K above " + std::to_string(kMaxRankingIgItems) +
            " needs ig_estimator \"first-choice\"");
  }
  try {
    sampler.validate();
  } catch (const std::invalid_argument& e) {
    invalid(e.what());
  }
  if (pool.synthetic()) {
    if (pool.dim == 0) invalid("d must be at least 1");
    if (pool.dim > kMaxDim) invalid("d must be at most " + std::to_string(kMaxDim));
    if (pool.size > kMaxCount) invalid("pool_size must be at most " + std::to_string(kMaxCount));
    if (pool.size < query_size) invalid("pool_size must be at least K");
    if (!(pool.low < pool.high)) invalid("low must be below high");
  }
}

nlohmann::json SessionConfig::to_json() const {
  nlohmann::json j = {
      {"strategy", strategy_name(strategy)},
      {"K", query_size},
      {"D", candidates},
      {"M", posterior_samples},
      {"beta", beta},
      {"sigma0", sigma0},
      {"surrogate_rank", surrogate_rank},
      {"ig_estimator", estimator_name(ig_estimator)},
      {"seed", seed},
      {"sampler",
       {{"proposal_scale", sampler.proposal_scale},
        {"burn_in", sampler.burn_in},
        {"thinning", sampler.thinning},
        {"particles", sampler.particles}}},
  };
  if (pool.synthetic()) {
    j["d"] = pool.dim;
    j["pool_size"] = pool.size;
    j["pool_seed"] = pool.seed;
    j["low"] = pool.low;
    j["high"] = pool.high;
  } else {
    j["dataset"] = pool.dataset;
  }
  return j;
}

SessionConfig SessionConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("session config must be a JSON object");
  SessionConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "strategy") {
      try {
        c.strategy = parse_strategy(get_field<std::string>(v, "strategy"));
      } catch (const std::invalid_argument& e) {
        invalid(e.what());
      }
    } else if (key == "K") {
      c.query_size = get_count(v, "K");
    } else if (key == "D") {
      c.candidates = get_count(v, "D");
    } else if (key == "M") {
      c.posterior_samples = get_count(v, "M");
    } else if (key == "beta") {
      c.beta = get_real(v, "beta");
    } else if (key == "sigma0") {
      c.sigma0 = get_real(v, "sigma0");
    } else if (key == "surrogate_rank") {
      c.surrogate_rank = get_field<bool>(v, "surrogate_rank");
    } else if (key == "ig_estimator") {
      c.ig_estimator = estimator_from_json(get_field<std::string>(v, "ig_estimator"));
    } else if (key == "seed") {
      c.seed = get_seed(v, "seed");
    } else if (key == "d") {
      c.pool.dim = get_count(v, "d");
    } else if (key == "pool_size") {
      c.pool.size = get_count(v, "pool_size");
    } else if (key == "pool_seed") {
      c.pool.seed = get_seed(v, "pool_seed");
    } else if (key == "low") {
      c.pool.low = get_real(v, "low");
    } else if (key == "high") {
      c.pool.high = get_real(v, "high");
    } else if (key == "dataset") {
      c.pool.dataset = get_field<std::string>(v, "dataset");
    } else if (key == "sampler") {
      if (!v.is_object()) invalid("field 'sampler' must be an object");
      for (const auto& [sk, sv] : v.items()) {
        if (sk == "proposal_scale") {
          c.sampler.proposal_scale = get_real(sv, "sampler.proposal_scale");
        } else if (sk == "burn_in") {
          c.sampler.burn_in = get_count(sv, "sampler.burn_in");
        } else if (sk == "thinning") {
          c.sampler.thinning = get_count(sv, "sampler.thinning");
        } else if (sk == "particles") {
          c.sampler.particles = get_count(sv, "sampler.particles");
        } else {
          invalid("unknown field 'sampler." + sk + "'");
        }
      }
    } else {
      invalid("unknown field '" + key + "'");
    }
  }
  return c;
}

Session::Session(std::string id, SessionConfig config, std::shared_ptr<const FeaturePool> pool)
    : id_(std::move(id)),
      config_(std::move(config)),
      pool_(std::move(pool)),
      belief_(Belief::init_uniform(pool_->dim(), config_.sampler, ChoiceModel(config_.beta),
                                   derive_seed(config_.seed, kBeliefStream))),
      strategy_(strategy_config(config_, *pool_), pool_, /*snap_to_pool=*/true) {}

Session Session::create(std::string id, SessionConfig config,
                        std::shared_ptr<const FeaturePool> pool, const Sink& sink) {
  config.validate();
  if (!pool) throw ServiceError(ErrorCode::kInternal, "session created without a pool");
  if (pool->size() < config.query_size) invalid("pool has fewer items than K");
  Session s(std::move(id), std::move(config), std::move(pool));
  Event e = s.make_event(EventType::kCreate);
  e.payload = {{"session_id", s.id_},
               {"config", s.config_.to_json()},
               {"pool_digest", pool_digest(*s.pool_)}};
  sink(e);
  s.created_at_ = e.time;
  ++s.next_seq_;
  return s;
}

Session Session::replay(
    const SessionLog& log,
    const std::function<std::shared_ptr<const FeaturePool>(const PoolSpec&)>& resolve_pool) {
  const auto fail = [&](const std::string& what) -> void {
    throw ServiceError(ErrorCode::kCorruptLog, "session " + log.session_id + ": " + what);
  };
  if (log.events.empty() || log.events[0].type != EventType::kCreate) {
    fail("log does not start with a create event");
  }
  const Event& first = log.events[0];
  SessionConfig config;
  std::string digest;
  try {
    if (first.payload.at("session_id").get<std::string>() != log.session_id) {
      fail("create event names another session");
    }
    config = SessionConfig::from_json(first.payload.at("config"));
    config.validate();
    digest = first.payload.at("pool_digest").get<std::string>();
  } catch (const ServiceError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("bad create event: ") + e.what());
  }
  std::shared_ptr<const FeaturePool> pool = resolve_pool(config.pool);
  if (pool_digest(*pool) != digest) fail("item pool differs from the one the session used");

  Session s(log.session_id, std::move(config), std::move(pool));
  s.created_at_ = first.time;
  s.next_seq_ = 1;
  for (std::size_t i = 1; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    try {
      switch (e.type) {
        case EventType::kCreate:
          fail("second create event at seq " + std::to_string(e.seq));
          break;
        case EventType::kQuery: {
          if (!e.seed) fail("query event without seed at seq " + std::to_string(e.seq));
          if (s.pending_) fail("query issued while another is pending at seq " + std::to_string(e.seq));
          const auto qid = e.payload.at("query_id").get<std::uint64_t>();
          if (qid != s.issued_ + 1) fail("query ids out of order at seq " + std::to_string(e.seq));
          Query q = s.generate(*e.seed);
          const auto logged = e.payload.at("items").get<std::vector<std::string>>();
          std::vector<std::string> ids;
          for (const auto& item : q.items()) ids.push_back(item.id);
          if (ids != logged) {
            fail("regenerated query " + std::to_string(qid) + " differs from the log");
          }
          s.issued_ = qid;
          for (const auto& id : ids) s.displayed_.insert(id);
          s.pending_ = IssuedQuery{qid, std::move(q)};
          break;
        }
        case EventType::kRanking: {
          const auto qid = e.payload.at("query_id").get<std::uint64_t>();
          if (!s.pending_ || s.pending_->query_id != qid) {
            fail("ranking for a query that is not pending at seq " + std::to_string(e.seq));
          }
          Ranking r(e.payload.at("order").get<std::vector<std::size_t>>());
          if (!r.valid_for(s.pending_->query)) fail("ranking size mismatch");
          s.apply_ranking(r);
          break;
        }
        case EventType::kFavorite: {
          const auto item = e.payload.at("item_id").get<std::string>();
          if (!s.displayed_.contains(item)) fail("favorite was never displayed");
          s.favorite_ = item;
          break;
        }
      }
    } catch (const ServiceError&) {
      throw;
    } catch (const std::exception& ex) {
      fail("event " + std::to_string(e.seq) + ": " + ex.what());
    }
    s.next_seq_ = e.seq + 1;
  }
  return s;
}

Event Session::make_event(EventType type) const {
  Event e;
  e.seq = next_seq_;
  e.type = type;
  e.time = utc_timestamp();
  return e;
}

Query Session::generate(std::uint64_t seed) {
  Rng rng(seed);
  return strategy_.next_query(belief_, rng);
}

const IssuedQuery& Session::query(const Sink& sink) {
  if (pending_) return *pending_;
  const std::uint64_t qid = issued_ + 1;
  const std::uint64_t seed = derive_seed(config_.seed, kQueryStream, qid);
  Query q = generate(seed);
  Event e = make_event(EventType::kQuery);
  e.seed = seed;
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& item : q.items()) ids.push_back(item.id);
  e.payload = {{"query_id", qid}, {"items", ids}};
  sink(e);
  ++next_seq_;
  issued_ = qid;
  for (const auto& item : q.items()) displayed_.insert(item.id);
  pending_ = IssuedQuery{qid, std::move(q)};
  return *pending_;
}

void Session::submit_ranking(const std::vector<std::size_t>& order,
                             std::optional<std::uint64_t> query_id, const Sink& sink) {
  if (query_id) {
    if (*query_id == 0 || *query_id > issued_) {
      invalid("unknown query_id " + std::to_string(*query_id));
    }
    if (!pending_ || pending_->query_id != *query_id) {
      throw ServiceError(ErrorCode::kDoubleSubmission,
                         "query " + std::to_string(*query_id) + " was already ranked");
    }
  } else if (!pending_) {
    if (issued_ == 0) {
      throw ServiceError(ErrorCode::kNoPendingQuery, "no query has been issued yet");
    }
    throw ServiceError(ErrorCode::kDoubleSubmission,
                       "query " + std::to_string(issued_) + " was already ranked");
  }
  Ranking ranking;
  try {
    ranking = Ranking(order);
  } catch (const std::invalid_argument& e) {
    throw ServiceError(ErrorCode::kInvalidRanking, e.what());
  }
  if (!ranking.valid_for(pending_->query)) {
    throw ServiceError(ErrorCode::kInvalidRanking,
                       "ranking has " + std::to_string(order.size()) + " entries, query has " +
                           std::to_string(pending_->query.size()));
  }
  Event e = make_event(EventType::kRanking);
  e.payload = {{"query_id", pending_->query_id}, {"order", order}};
  sink(e);
  ++next_seq_;
  apply_ranking(ranking);
}

void Session::submit_ranking_ids(const std::vector<std::string>& order,
                                 std::optional<std::uint64_t> query_id, const Sink& sink) {
  // Resolve against the pending query; submit_ranking re-checks the state.
  std::vector<std::size_t> positions;
  positions.reserve(order.size());
  if (pending_ && (!query_id || *query_id == pending_->query_id)) {
    const auto& items = pending_->query.items();
    for (const auto& id : order) {
      auto it = std::find_if(items.begin(), items.end(),
                             [&](const QueryItem& item) { return item.id == id; });
      if (it == items.end()) {
        throw ServiceError(ErrorCode::kInvalidRanking,
                           "item '" + id + "' is not part of the pending query");
      }
      positions.push_back(static_cast<std::size_t>(it - items.begin()));
    }
  }
  submit_ranking(positions, query_id, sink);
}

void Session::apply_ranking(const Ranking& ranking) {
  const Query& q = pending_->query;
  belief_.observe(q, ranking);
  strategy_.feedback(q, ranking, belief_);
  ++rankings_;
  pending_.reset();
}

void Session::set_favorite(const std::string& item_id, const Sink& sink) {
  if (!displayed_.contains(item_id)) {
    throw ServiceError(ErrorCode::kItemNotDisplayed,
                       "item '" + item_id + "' has not been shown in this session");
  }
  Event e = make_event(EventType::kFavorite);
  e.payload = {{"item_id", item_id}};
  sink(e);
  ++next_seq_;
  favorite_ = item_id;
}

std::size_t Session::predicted_best() const { return pool_->argmax_reward(belief_.estimate()); }

std::string Session::digest() const {
  Digest h;
  h.add(belief_.particles());
  if (const auto& cma = strategy_.cma()) {
    h.add(cma->mean());
    h.add(cma->covariance());
    h.add(cma->sigma());
    h.add(cma->path_sigma());
    h.add(cma->path_c());
    h.add(static_cast<std::uint64_t>(cma->generation()));
  }
  h.add(static_cast<std::uint64_t>(issued_));
  h.add(static_cast<std::uint64_t>(rankings_));
  if (pending_) {
    h.add(pending_->query_id);
    for (const auto& item : pending_->query.items()) h.add(item.id);
  }
  h.add(favorite_ ? "favorite:" + *favorite_ : std::string("favorite:-"));
  return h.hex();
}

}  // namespace cmaesig::service
