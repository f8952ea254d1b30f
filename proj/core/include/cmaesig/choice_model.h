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

// Bradley-Terry selection and its Plackett-Luce extension to full rankings.
//
// A user with linear reward R(xi) = omega . Phi(xi) picks item i from a set Q
// with probability exp(beta R_i) / sum_j exp(beta R_j). A ranking is a
// sequence of such picks without replacement, so its likelihood is the
// product of the per-stage selection probabilities.

#ifndef CMAESIG_CHOICE_MODEL_H_
#define CMAESIG_CHOICE_MODEL_H_

#include <span>
#include <vector>

#include "cmaesig/types.h"

namespace cmaesig {

// omega . phi. Throws std::invalid_argument on dimension mismatch.
double reward(const WeightVector& w, const FeatureVector& f);

// Numerically stable log(sum(exp(x))). Returns -inf for an empty input.
double log_sum_exp(std::span<const double> x);

class ChoiceModel {
 public:
  static constexpr double kDefaultBeta = 1.0;

  // Throws std::invalid_argument unless beta is finite and >= 0.
  explicit ChoiceModel(double beta = kDefaultBeta);

  double beta() const { return beta_; }

  // Softmax over beta * rewards. Throws std::invalid_argument if any scaled
  // reward is non-finite or `rewards` is empty.
  std::vector<double> selection_probabilities_from_rewards(std::span<const double> rewards) const;

  std::vector<double> selection_probabilities(const WeightVector& w, const Query& q) const;

  // Sum over stages of log p(chosen | remaining). The last stage is a
  // singleton and contributes 0.
  double ranking_log_likelihood_from_rewards(std::span<const double> rewards,
                                             std::span<const std::size_t> order) const;

  double ranking_log_likelihood(const WeightVector& w, const Query& q, const Ranking& r) const;

  // Draws a ranking by repeated selection without replacement.
  Ranking sample_ranking_from_rewards(std::span<const double> rewards, Rng& rng) const;

  Ranking sample_ranking(const WeightVector& w, const Query& q, Rng& rng) const;

 private:
  double beta_;
};

std::vector<double> query_rewards(const WeightVector& w, const Query& q);

}  // namespace cmaesig

#endif  // CMAESIG_CHOICE_MODEL_H_
