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

#include "cmaesig/information_gain.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <gtest/gtest.h>

#include "cmaesig/belief.h"
#include "oracles.h"

namespace cmaesig {

// Readable parameter values in test names and failure messages.
void PrintTo(IgEstimator e, std::ostream* os) { *os << estimator_name(e); }

namespace {

using testing::all_permutations;
using testing::all_subsets;
using testing::ball_samples;

// Direct evaluation of the first-choice estimator from its definition.
double oracle_first_choice(const Matrix& features, const Matrix& omegas, double beta) {
  const auto k = features.rows();
  const auto m = omegas.rows();
  Matrix p(m, k);
  for (Eigen::Index a = 0; a < m; ++a) {
    double z = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) z += std::exp(beta * omegas.row(a).dot(features.row(i)));
    for (Eigen::Index i = 0; i < k; ++i) {
      p(a, i) = std::exp(beta * omegas.row(a).dot(features.row(i))) / z;
    }
  }
  double ig = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index i = 0; i < k; ++i) {
      ig += p(a, i) * std::log2(static_cast<double>(m) * p(a, i) / p.col(i).sum());
    }
  }
  return ig / static_cast<double>(m);
}

double pl_probability(const Vector& rewards, const std::vector<std::size_t>& order) {
  double p = 1.0;
  for (std::size_t s = 0; s < order.size(); ++s) {
    double z = 0.0;
    for (std::size_t j = s; j < order.size(); ++j) z += std::exp(rewards[order[j]]);
    p *= std::exp(rewards[order[s]]) / z;
  }
  return p;
}

// Same estimator with whole orderings as outcomes.
double oracle_ranking(const Matrix& features, const Matrix& omegas, double beta) {
  const auto m = omegas.rows();
  const auto perms = all_permutations(static_cast<std::size_t>(features.rows()));
  Matrix p(m, static_cast<Eigen::Index>(perms.size()));
  for (Eigen::Index a = 0; a < m; ++a) {
    const Vector rewards = beta * (features * omegas.row(a).transpose());
    for (std::size_t o = 0; o < perms.size(); ++o) {
      p(a, static_cast<Eigen::Index>(o)) = pl_probability(rewards, perms[o]);
    }
  }
  double ig = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index o = 0; o < p.cols(); ++o) {
      ig += p(a, o) * std::log2(static_cast<double>(m) * p(a, o) / p.col(o).sum());
    }
  }
  return ig / static_cast<double>(m);
}

Matrix rows_of(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

TEST(InformationGain, MatchesDefinition) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix f = testing::uniform_matrix(4, 3, rng);
    const Matrix w = ball_samples(25, 3, rng);
    const double beta = 0.5 + trial * 0.2;
    EXPECT_NEAR(information_gain(f, w, beta), oracle_first_choice(f, w, beta), 1e-10);
    EXPECT_NEAR(ranking_information_gain(f, w, beta), oracle_ranking(f, w, beta), 1e-10);
  }
}

TEST(InformationGain, SingleSampleCarriesNoInformation) {
  Rng rng(2);
  const Matrix f = testing::uniform_matrix(4, 3, rng);
  const Matrix w = ball_samples(1, 3, rng);
  EXPECT_NEAR(information_gain(f, w, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(ranking_information_gain(f, w, 1.0), 0.0, 1e-12);
}

TEST(InformationGain, IdenticalItemsCarryNoInformation) {
  Rng rng(3);
  const Matrix f = Vector{{0.3, -0.7}}.transpose().replicate(3, 1);
  const Matrix w = ball_samples(50, 2, rng);
  EXPECT_NEAR(information_gain(f, w, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(ranking_information_gain(f, w, 1.0), 0.0, 1e-12);
}

TEST(InformationGain, OpposedPairApproachesOneBit) {
  const Matrix f{{1.0, 0.0}, {-1.0, 0.0}};
  const Matrix w{{1.0, 0.0}, {-1.0, 0.0}};
  // Closed form: p = P(agreeing item) = 1 / (1 + exp(-2 beta)); each column
  // sums to 1, so IG = p log2(2p) + (1 - p) log2(2 (1 - p)).
  for (double beta : {1.0, 5.0, 50.0}) {
    const double p = 1.0 / (1.0 + std::exp(-2.0 * beta));
    const double q = 1.0 / (1.0 + std::exp(2.0 * beta));  // 1 - p without cancellation
    auto term = [](double x) { return x > 0.0 ? x * std::log2(2 * x) : 0.0; };
    const double closed = term(p) + term(q);
    EXPECT_NEAR(information_gain(f, w, beta), closed, 1e-12);
    EXPECT_NEAR(ranking_information_gain(f, w, beta), closed, 1e-12);  // K=2: same outcomes
  }
  EXPECT_GT(information_gain(f, w, 50.0), 1.0 - 1e-9);
}

TEST(InformationGain, BoundsAndInvariances) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 2 + trial % 4;
    const std::size_t m = 1 + (trial * 7) % 30;
    const Matrix f = testing::uniform_matrix(static_cast<Eigen::Index>(k), 3, rng);
    const Matrix w = ball_samples(m, 3, rng);
    const double beta = 3.0;
    const double fc = information_gain(f, w, beta);
    const double rk = ranking_information_gain(f, w, beta);
    EXPECT_GE(fc, -1e-9);
    EXPECT_LE(fc, std::log2(std::min<double>(k, m)) + 1e-9);
    EXPECT_GE(rk, -1e-9);
    EXPECT_LE(rk, std::log2(std::min<double>(std::tgamma(k + 1.0), m)) + 1e-9);
    // Data-processing: the ranking reveals at least the first choice.
    EXPECT_GE(rk, fc - 1e-9);

    std::vector<Eigen::Index> item_perm(k), sample_perm(m);
    std::iota(item_perm.begin(), item_perm.end(), Eigen::Index{0});
    std::iota(sample_perm.begin(), sample_perm.end(), Eigen::Index{0});
    std::shuffle(item_perm.begin(), item_perm.end(), rng);
    std::shuffle(sample_perm.begin(), sample_perm.end(), rng);
    const Matrix fp = f(item_perm, Eigen::all);
    const Matrix wp = w(sample_perm, Eigen::all);
    EXPECT_NEAR(information_gain(fp, wp, beta), fc, 1e-10);
    EXPECT_NEAR(ranking_information_gain(fp, wp, beta), rk, 1e-10);
  }
}

TEST(InformationGain, LogitFormMatchesFeatureForm) {
  Rng rng(5);
  const Matrix cand = testing::uniform_matrix(12, 4, rng);
  const Matrix w = ball_samples(30, 4, rng);
  const Matrix logits = 2.0 * (w * cand.transpose());
  const std::vector<std::size_t> subset = {7, 2, 10, 4};
  const Matrix f = rows_of(cand, subset);
  EXPECT_NEAR(information_gain_from_logits(logits, subset), information_gain(f, w, 2.0), 1e-12);
  EXPECT_NEAR(ranking_information_gain_from_logits(logits, subset),
              ranking_information_gain(f, w, 2.0), 1e-12);
  EXPECT_NEAR(information_gain_from_logits(logits, subset, IgEstimator::kRanking),
              ranking_information_gain(f, w, 2.0), 1e-12);
}

TEST(InformationGain, RejectsBadInput) {
  EXPECT_THROW(information_gain(Matrix::Zero(3, 2), Matrix::Zero(0, 2), 1.0), std::invalid_argument);
  EXPECT_THROW(information_gain(Matrix::Zero(3, 2), Matrix::Zero(4, 3), 1.0), std::invalid_argument);
  EXPECT_THROW(ranking_information_gain(Matrix::Zero(8, 2), Matrix::Zero(4, 2), 1.0),
               std::invalid_argument);
  const std::vector<std::size_t> bad = {0, 5};
  EXPECT_THROW(information_gain_from_logits(Matrix::Zero(2, 3), bad), std::out_of_range);
}

TEST(InformationGain, EstimatorNames) {
  EXPECT_EQ(parse_estimator(estimator_name(IgEstimator::kRanking)), IgEstimator::kRanking);
  EXPECT_EQ(parse_estimator(estimator_name(IgEstimator::kFirstChoice)), IgEstimator::kFirstChoice);
  EXPECT_THROW(parse_estimator("top-1"), std::invalid_argument);
}

class GreedyIg : public ::testing::TestWithParam<IgEstimator> {};

TEST_P(GreedyIg, ReachesNinetyPercentOfExhaustiveOptimum) {
  const IgEstimator estimator = GetParam();
  double worst = 1.0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(700 + seed);
    const Matrix cand = testing::uniform_matrix(8, 4, rng);
    const Matrix w = ball_samples(20, 4, rng);
    const Matrix logits = w * cand.transpose();
    double best = 0.0;
    for (const auto& s : all_subsets(8, 3)) {
      best = std::max(best, information_gain_from_logits(logits, s, estimator));
    }
    const auto picks = greedy_information_gain(cand, w, 1.0, 3, estimator);
    const double got = information_gain_from_logits(logits, picks, estimator);
    EXPECT_GE(got, 0.9 * best) << "seed " << seed;
    worst = std::min(worst, got / best);
  }
  RecordProperty("worst_ratio", std::to_string(worst));
}

TEST_P(GreedyIg, ReturnsDistinctValidIndices) {
  const IgEstimator estimator = GetParam();
  Rng rng(8);
  const Matrix cand = testing::uniform_matrix(40, 5, rng);
  for (std::size_t m : {1u, 10u}) {
    const Matrix w = ball_samples(m, 5, rng);
    const auto picks = greedy_information_gain(cand, w, 1.0, 4, estimator);
    ASSERT_EQ(picks.size(), 4u);
    EXPECT_EQ(std::set<std::size_t>(picks.begin(), picks.end()).size(), 4u);
    for (auto p : picks) EXPECT_LT(p, 40u);
  }
  EXPECT_THROW(greedy_information_gain(cand.topRows(3), ball_samples(5, 5, rng), 1.0, 4, estimator),
               std::invalid_argument);
}

TEST_P(GreedyIg, TiesGoToTheLowestIndex) {
  // Identical candidates: every choice scores the same.
  const Matrix cand = Vector{{0.1, 0.2}}.transpose().replicate(6, 1);
  Rng rng(9);
  const auto picks = greedy_information_gain(cand, ball_samples(10, 2, rng), 1.0, 3, GetParam());
  EXPECT_EQ(picks, (std::vector<std::size_t>{0, 1, 2}));
}

TEST_P(GreedyIg, SelectingAllCandidatesReturnsThemAll) {
  Rng rng(10);
  const Matrix cand = testing::uniform_matrix(4, 3, rng);
  auto picks = greedy_information_gain(cand, ball_samples(20, 3, rng), 1.0, 4, GetParam());
  std::sort(picks.begin(), picks.end());
  EXPECT_EQ(picks, (std::vector<std::size_t>{0, 1, 2, 3}));
}

INSTANTIATE_TEST_SUITE_P(Estimators, GreedyIg,
                         ::testing::Values(IgEstimator::kFirstChoice, IgEstimator::kRanking),
                         [](const auto& info) {
                           return info.param == IgEstimator::kRanking ? "Ranking" : "FirstChoice";
                         });

TEST(GreedyIg, RankingObjectiveCapsQuerySize) {
  Rng rng(11);
  const Matrix cand = testing::uniform_matrix(20, 3, rng);
  EXPECT_THROW(greedy_information_gain(cand, ball_samples(5, 3, rng), 1.0, 8, IgEstimator::kRanking),
               std::invalid_argument);
  EXPECT_NO_THROW(
      greedy_information_gain(cand, ball_samples(5, 3, rng), 1.0, 8, IgEstimator::kFirstChoice));
}

}  // namespace
}  // namespace cmaesig
