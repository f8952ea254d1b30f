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

#include "cmaesig/belief.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmaesig {

void SamplerConfig::validate() const {
  if (!(proposal_scale > 0.0) || !std::isfinite(proposal_scale)) {
    throw std::invalid_argument("proposal scale must be positive");
  }
  if (thinning == 0) throw std::invalid_argument("thinning stride must be >= 1");
  if (particles == 0) throw std::invalid_argument("particle count must be >= 1");
}

WeightVector sample_unit_sphere(std::size_t d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  WeightVector v(d);
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < d; ++i) v[i] = normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

WeightVector sample_unit_ball(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  WeightVector dir = sample_unit_sphere(d, rng);
  return dir * std::pow(unif(rng), 1.0 / static_cast<double>(d));
}

Belief::Belief(std::size_t d, const SamplerConfig& config, const ChoiceModel& model,
               std::uint64_t seed)
    : dim_(d), config_(config), model_(model), rng_(seed), stacked_features_(0, d) {}

Belief Belief::init_uniform(std::size_t d, const SamplerConfig& config, const ChoiceModel& model,
                            std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("belief dimension must be >= 1");
  config.validate();
  Belief b(d, config, model, seed);
  b.refresh();
  return b;
}

void Belief::observe(const Query& q, const Ranking& r) {
  if (q.dim() != dim_) throw std::invalid_argument("observation dimension differs from belief");
  if (!r.valid_for(q)) throw std::invalid_argument("ranking does not match query size");
  offsets_.push_back(static_cast<std::size_t>(stacked_features_.rows()));
  stacked_features_.conservativeResize(stacked_features_.rows() + static_cast<Eigen::Index>(q.size()),
                                       Eigen::NoChange);
  stacked_features_.bottomRows(static_cast<Eigen::Index>(q.size())) = q.feature_matrix();
  history_.push_back({q, r});
  refresh();
}

double Belief::log_likelihood(const WeightVector& w) const {
  if (history_.empty()) return 0.0;
  const Vector rewards = stacked_features_ * w;
  double total = 0.0;
  for (std::size_t j = 0; j < history_.size(); ++j) {
    const auto& obs = history_[j];
    total += model_.ranking_log_likelihood_from_rewards(
        std::span<const double>(rewards.data() + offsets_[j], obs.query.size()),
        obs.ranking.order());
  }
  return total;
}

double Belief::log_posterior(const WeightVector& w) const {
  if (static_cast<std::size_t>(w.size()) != dim_) {
    throw std::invalid_argument("log_posterior: dimension mismatch");
  }
  if (w.squaredNorm() > 1.0) return -std::numeric_limits<double>::infinity();
  return log_likelihood(w);
}

void Belief::refresh() {
  const auto m = static_cast<Eigen::Index>(config_.particles);
  const auto d = static_cast<Eigen::Index>(dim_);
  Matrix next(m, d);
  if (history_.empty()) {
    for (Eigen::Index i = 0; i < m; ++i) next.row(i) = sample_unit_ball(dim_, rng_).transpose();
    particles_ = std::move(next);
    return;
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  WeightVector current = particles_.colwise().mean().transpose();
  double current_lp = log_posterior(current);
  WeightVector proposal(d);

  auto step = [&]() {
    for (Eigen::Index i = 0; i < d; ++i) {
      proposal[i] = current[i] + config_.proposal_scale * normal(rng_);
    }
    // Prior indicator rejects without touching the likelihood.
    if (proposal.squaredNorm() > 1.0) return;
    const double lp = log_likelihood(proposal);
    const double log_ratio = lp - current_lp;
    if (log_ratio >= 0.0 || std::log(unif(rng_)) < log_ratio) {
      current = proposal;
      current_lp = lp;
    }
  };

  for (std::size_t i = 0; i < config_.burn_in; ++i) step();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < config_.thinning; ++t) step();
    next.row(i) = current.transpose();
  }
  particles_ = std::move(next);
}

Matrix Belief::sample(std::size_t n, Rng& rng) const {
  const auto m = static_cast<std::size_t>(particles_.rows());
  Matrix out(static_cast<Eigen::Index>(n), particles_.cols());
  if (n <= m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n entries are a uniform subset.
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, m - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.row(static_cast<Eigen::Index>(i)) = particles_.row(static_cast<Eigen::Index>(idx[i]));
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    for (std::size_t i = 0; i < n; ++i) {
      out.row(static_cast<Eigen::Index>(i)) = particles_.row(static_cast<Eigen::Index>(pick(rng)));
    }
  }
  return out;
}

WeightVector Belief::estimate() const { return particles_.colwise().mean().transpose(); }

}  // namespace cmaesig
