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

#ifndef CMAESIG_METRICS_H_
#define CMAESIG_METRICS_H_

#include <span>

#include "cmaesig/feature_pool.h"
#include "cmaesig/types.h"

namespace cmaesig {

// Cosine similarity. A zero vector yields 0 (only happens for an
// uninformed estimate) and a one-line note on std::clog.
double alignment(const WeightVector& estimate, const WeightVector& truth);

// Mean true reward of the query items.
double quality(const Query& q, const WeightVector& truth);

// True-reward gap between the pool's best item under `truth` and the pool's
// best item under `estimate`. Never negative.
double regret(const FeaturePool& pool, const WeightVector& estimate, const WeightVector& truth);
// As above with the truth-optimal reward precomputed.
double regret(const FeaturePool& pool, const WeightVector& estimate, const WeightVector& truth,
              double best_true_reward);

// Arithmetic mean of a per-iteration curve. Throws std::invalid_argument on
// an empty curve.
double auc(std::span<const double> curve);

}  // namespace cmaesig

#endif  // CMAESIG_METRICS_H_
