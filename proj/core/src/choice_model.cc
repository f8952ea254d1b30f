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

#include "cmaesig/choice_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmaesig {

double reward(const WeightVector& w, const FeatureVector& f) {
  require_same_dim(w, f, "reward");
  return w.dot(f);
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

ChoiceModel::ChoiceModel(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw std::invalid_argument("rationality beta must be finite and >= 0");
  }
}

std::vector<double> ChoiceModel::selection_probabilities_from_rewards(
    std::span<const double> rewards) const {
  if (rewards.empty()) throw std::invalid_argument("selection over an empty set");
  std::vector<double> logits(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    logits[i] = beta_ * rewards[i];
    if (!std::isfinite(logits[i])) throw std::invalid_argument("non-finite reward in selection");
  }
  const double hi = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : logits) v /= total;
  return logits;
}

std::vector<double> ChoiceModel::selection_probabilities(const WeightVector& w,
                                                         const Query& q) const {
  return selection_probabilities_from_rewards(query_rewards(w, q));
}

double ChoiceModel::ranking_log_likelihood_from_rewards(std::span<const double> rewards,
                                                        std::span<const std::size_t> order) const {
  const std::size_t k = order.size();
  std::vector<double> remaining(k);
  // Stage i picks order[i] from {order[i], ..., order[k-1]}.
  double total = 0.0;
  for (std::size_t stage = 0; stage + 1 < k; ++stage) {
    const std::size_t n = k - stage;
    for (std::size_t j = 0; j < n; ++j) remaining[j] = beta_ * rewards[order[stage + j]];
    total += remaining[0] - log_sum_exp(std::span<const double>(remaining.data(), n));
  }
  return total;
}

double ChoiceModel::ranking_log_likelihood(const WeightVector& w, const Query& q,
                                           const Ranking& r) const {
  if (!r.valid_for(q)) throw std::invalid_argument("ranking size does not match query");
  const auto rewards = query_rewards(w, q);
  return ranking_log_likelihood_from_rewards(rewards, r.order());
}

Ranking ChoiceModel::sample_ranking_from_rewards(std::span<const double> rewards, Rng& rng) const {
  std::vector<std::size_t> remaining(rewards.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> order;
  order.reserve(rewards.size());
  std::vector<double> stage_rewards;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (!remaining.empty()) {
    stage_rewards.clear();
    for (auto idx : remaining) stage_rewards.push_back(rewards[idx]);
    const auto probs = selection_probabilities_from_rewards(stage_rewards);
    const double u = unif(rng);
    double cum = 0.0;
    std::size_t pick = remaining.size() - 1;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      cum += probs[j];
      if (u < cum) {
        pick = j;
        break;
      }
    }
    order.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Ranking(std::move(order));
}

Ranking ChoiceModel::sample_ranking(const WeightVector& w, const Query& q, Rng& rng) const {
  return sample_ranking_from_rewards(query_rewards(w, q), rng);
}

std::vector<double> query_rewards(const WeightVector& w, const Query& q) {
  std::vector<double> out;
  out.reserve(q.size());
  for (const auto& item : q.items()) out.push_back(reward(w, item.features));
  return out;
}

}  // namespace cmaesig
