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

#ifndef CMAESIG_BELIEF_H_
#define CMAESIG_BELIEF_H_

#include <cstdint>
#include <vector>

#include "cmaesig/choice_model.h"
#include "cmaesig/types.h"

namespace cmaesig {

// Metropolis-Hastings settings for refreshing the particle set.
struct SamplerConfig {
  double proposal_scale = 0.1;
  std::size_t burn_in = 500;
  std::size_t thinning = 10;
  std::size_t particles = 100;

  void validate() const;
};

// Uniform draw from the closed d-dimensional unit ball.
WeightVector sample_unit_ball(std::size_t d, Rng& rng);

// Uniform draw from the unit sphere.
WeightVector sample_unit_sphere(std::size_t d, Rng& rng);

// Particle approximation of p(omega | rankings) under a uniform prior on the
// unit ball. After every observation the particle set is regenerated by a
// fresh MH chain started at the previous particle mean. Each Belief owns its
// sampler stream, so observe() is deterministic given the construction seed
// and the observation sequence.
class Belief {
 public:
  struct Observation {
    Query query;
    Ranking ranking;
  };

  // Throws std::invalid_argument for d == 0 or an invalid config.
  static Belief init_uniform(std::size_t d, const SamplerConfig& config, const ChoiceModel& model,
                             std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  const ChoiceModel& model() const { return model_; }
  const SamplerConfig& config() const { return config_; }
  const std::vector<Observation>& history() const { return history_; }

  // M x d, one particle per row.
  const Matrix& particles() const { return particles_; }

  // Appends the observation and refreshes the particles. Throws
  // std::invalid_argument if the ranking does not fit the query or the query
  // dimension differs from the belief's.
  void observe(const Query& q, const Ranking& r);

  // n x d matrix of particles drawn uniformly; without replacement when
  // n <= M, with replacement otherwise.
  Matrix sample(std::size_t n, Rng& rng) const;

  // Particle mean; approximately zero before any observation.
  WeightVector estimate() const;

  // Unnormalized log posterior: -inf outside the unit ball.
  double log_posterior(const WeightVector& w) const;

 private:
  Belief(std::size_t d, const SamplerConfig& config, const ChoiceModel& model, std::uint64_t seed);

  double log_likelihood(const WeightVector& w) const;
  void refresh();

  std::size_t dim_;
  SamplerConfig config_;
  ChoiceModel model_;
  Rng rng_;
  std::vector<Observation> history_;
  // All observed feature rows stacked; observation j occupies rows
  // [offsets_[j], offsets_[j] + history_[j].query.size()).
  Matrix stacked_features_;
  std::vector<std::size_t> offsets_;
  Matrix particles_;
};

}  // namespace cmaesig

#endif  // CMAESIG_BELIEF_H_
