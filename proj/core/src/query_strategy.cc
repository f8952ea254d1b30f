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

#include "cmaesig/query_strategy.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

#include "cmaesig/information_gain.h"
#include "cmaesig/medoids.h"

namespace cmaesig {

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kInfoGain:
      return "IG";
    case StrategyKind::kCmaEs:
      return "CMA-ES";
    case StrategyKind::kCmaEsIg:
      return "CMA-ES-IG";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::erase(s, '_');
  if (s == "ig" || s == "infogain") return StrategyKind::kInfoGain;
  if (s == "cma-es" || s == "cmaes") return StrategyKind::kCmaEs;
  if (s == "cma-es-ig" || s == "cmaes-ig" || s == "cmaesig") return StrategyKind::kCmaEsIg;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected IG, CMA-ES or CMA-ES-IG)");
}

std::string_view selector_name(CandidateSelector s) {
  return s == CandidateSelector::kMedoids ? "medoids" : "greedy-ig";
}

CandidateSelector parse_selector(std::string_view name) {
  if (name == "greedy-ig") return CandidateSelector::kGreedyIg;
  if (name == "medoids") return CandidateSelector::kMedoids;
  throw std::invalid_argument("unknown selector '" + std::string(name) +
                              "' (expected greedy-ig or medoids)");
}

void StrategyConfig::validate() const {
  if (query_size < 2) throw std::invalid_argument("query size K must be >= 2");
  if (candidates < query_size) throw std::invalid_argument("candidate count D must be >= K");
  if (posterior_samples == 0) throw std::invalid_argument("posterior sample count M must be >= 1");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw std::invalid_argument("sigma0 must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  if (ig_estimator == IgEstimator::kRanking && query_size > kMaxRankingIgItems &&
      (kind == StrategyKind::kInfoGain ||
       (kind == StrategyKind::kCmaEsIg && selector == CandidateSelector::kGreedyIg))) {
    throw std::invalid_argument("ranking information gain supports K <= " +
                                std::to_string(kMaxRankingIgItems));
  }
  bounds.validate();
}

QueryStrategy::QueryStrategy(StrategyConfig config, std::shared_ptr<const FeaturePool> pool,
                             bool snap_to_pool)
    : config_(std::move(config)), pool_(std::move(pool)), snap_(snap_to_pool) {
  config_.validate();
  if (!pool_) throw std::invalid_argument("query strategy requires a feature pool");
  if (pool_->dim() != config_.dim()) {
    throw std::invalid_argument("feature pool dimension differs from strategy bounds");
  }
  if (config_.kind != StrategyKind::kInfoGain) {
    const bool surrogate = config_.surrogate_rank && config_.kind == StrategyKind::kCmaEsIg;
    const std::size_t lambda =
        surrogate ? std::min(CmaParameters::default_lambda(config_.dim()), config_.candidates)
                  : config_.query_size;
    // Search starts at the center of the feature box.
    const Vector center = 0.5 * (config_.bounds.low + config_.bounds.high);
    cma_ = CmaState::init(config_.dim(), config_.sigma0, lambda, center);
  }
}

Query QueryStrategy::next_query(const Belief& belief, Rng& rng) {
  switch (config_.kind) {
    case StrategyKind::kInfoGain:
      return next_query_ig(belief, rng);
    case StrategyKind::kCmaEs:
      return next_query_cma(rng);
    case StrategyKind::kCmaEsIg:
      return next_query_cma_ig(belief, rng);
  }
  throw std::logic_error("unhandled strategy kind");
}

Query QueryStrategy::make_query(const Matrix& rows, std::span<const std::size_t> picks) {
  std::vector<QueryItem> items;
  items.reserve(picks.size());
  if (snap_) {
    std::vector<bool> taken(pool_->size(), false);
    for (auto pick : picks) {
      const FeatureVector f = rows.row(static_cast<Eigen::Index>(pick)).transpose();
      const std::size_t idx = pool_->nearest_excluding(f, taken);
      if (idx == pool_->size()) throw std::invalid_argument("feature pool smaller than query size");
      taken[idx] = true;
      items.push_back((*pool_)[idx]);
    }
  } else {
    const std::string prefix = "q" + std::to_string(issued_) + "-";
    for (std::size_t i = 0; i < picks.size(); ++i) {
      items.push_back({prefix + std::to_string(i),
                       rows.row(static_cast<Eigen::Index>(picks[i])).transpose(), std::nullopt,
                       std::nullopt});
    }
  }
  ++issued_;
  return Query(std::move(items));
}

Query QueryStrategy::next_query_ig(const Belief& belief, Rng& rng) {
  const std::size_t k = config_.query_size;
  if (pool_->size() < k) throw std::invalid_argument("feature pool smaller than query size");
  const std::size_t draw = std::min(config_.candidates, pool_->size());

  std::vector<std::size_t> idx(pool_->size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < draw; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  Matrix candidates(static_cast<Eigen::Index>(draw), static_cast<Eigen::Index>(pool_->dim()));
  for (std::size_t i = 0; i < draw; ++i) {
    candidates.row(static_cast<Eigen::Index>(i)) =
        pool_->features().row(static_cast<Eigen::Index>(idx[i]));
  }

  const Matrix omegas = belief.sample(config_.posterior_samples, rng);
  const auto picks =
      greedy_information_gain(candidates, omegas, config_.beta, k, config_.ig_estimator);
  last_ig_ = information_gain_from_logits(config_.beta * (omegas * candidates.transpose()), picks,
                                          config_.ig_estimator);

  std::vector<QueryItem> items;
  items.reserve(k);
  for (auto p : picks) items.push_back((*pool_)[idx[p]]);
  ++issued_;
  return Query(std::move(items));
}

Query QueryStrategy::next_query_cma(Rng& rng) {
  if (!cma_) throw std::logic_error("CMA-ES query requested from a strategy without CMA state");
  Matrix samples = cma_->sample_population(config_.query_size, rng);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    samples.row(i) = config_.bounds.clip(samples.row(i).transpose()).transpose();
  }
  std::vector<std::size_t> picks(config_.query_size);
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  return make_query(samples, picks);
}

Query QueryStrategy::next_query_cma_ig(const Belief& belief, Rng& rng) {
  if (!cma_) throw std::logic_error("CMA-ES-IG query requested from a strategy without CMA state");
  Matrix samples = cma_->sample_population(config_.candidates, rng);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    samples.row(i) = config_.bounds.clip(samples.row(i).transpose()).transpose();
  }
  const Matrix omegas = belief.sample(config_.posterior_samples, rng);
  const auto picks =
      config_.selector == CandidateSelector::kMedoids
          ? select_medoids(samples, config_.query_size)
          : greedy_information_gain(samples, omegas, config_.beta, config_.query_size,
                                    config_.ig_estimator);
  last_ig_ = information_gain_from_logits(config_.beta * (omegas * samples.transpose()), picks,
                                          config_.ig_estimator);
  last_candidates_ = samples;
  return make_query(samples, picks);
}

void QueryStrategy::feedback(const Query& query, const Ranking& ranking, const Belief& updated) {
  if (!ranking.valid_for(query)) throw std::invalid_argument("ranking does not match query size");
  if (!cma_) return;

  const bool surrogate = config_.surrogate_rank && config_.kind == StrategyKind::kCmaEsIg;
  if (surrogate) {
    if (static_cast<std::size_t>(last_candidates_.rows()) < cma_->lambda()) {
      throw std::invalid_argument("surrogate ranking needs the candidates of the last query");
    }
    const Matrix pop = last_candidates_.topRows(static_cast<Eigen::Index>(cma_->lambda()));
    const Vector scores = pop * updated.estimate();
    std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
    });
    Matrix ranked(pop.rows(), pop.cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
      ranked.row(static_cast<Eigen::Index>(i)) = pop.row(static_cast<Eigen::Index>(order[i]));
    }
    cma_ = cma_->update(ranked);
    return;
  }

  if (query.size() != cma_->lambda()) {
    throw std::invalid_argument("query size " + std::to_string(query.size()) +
                                " does not match CMA-ES population size " +
                                std::to_string(cma_->lambda()));
  }
  Matrix ranked(static_cast<Eigen::Index>(query.size()), static_cast<Eigen::Index>(query.dim()));
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    ranked.row(static_cast<Eigen::Index>(i)) = query[ranking[i]].features.transpose();
  }
  cma_ = cma_->update(ranked);
}

}  // namespace cmaesig
