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

#include "cmaesig/metrics.h"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace cmaesig {

double alignment(const WeightVector& estimate, const WeightVector& truth) {
  require_same_dim(estimate, truth, "alignment");
  const double denom = estimate.norm() * truth.norm();
  if (denom == 0.0) {
    std::clog << "cmaesig: alignment of a zero vector reported as 0\n";
    return 0.0;
  }
  return std::clamp(estimate.dot(truth) / denom, -1.0, 1.0);
}

double quality(const Query& q, const WeightVector& truth) {
  double total = 0.0;
  for (const auto& item : q.items()) {
    require_same_dim(item.features, truth, "quality");
    total += truth.dot(item.features);
  }
  return total / static_cast<double>(q.size());
}

double regret(const FeaturePool& pool, const WeightVector& estimate, const WeightVector& truth,
              double best_true_reward) {
  const std::size_t chosen = pool.argmax_reward(estimate);
  const double value = best_true_reward - truth.dot(pool[chosen].features);
  return std::max(0.0, value);
}

double regret(const FeaturePool& pool, const WeightVector& estimate, const WeightVector& truth) {
  const std::size_t best = pool.argmax_reward(truth);
  return regret(pool, estimate, truth, truth.dot(pool[best].features));
}

double auc(std::span<const double> curve) {
  if (curve.empty()) throw std::invalid_argument("auc of an empty curve");
  return std::accumulate(curve.begin(), curve.end(), 0.0) / static_cast<double>(curve.size());
}

}  // namespace cmaesig
