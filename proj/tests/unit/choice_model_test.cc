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

#include <cmath>
#include <map>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.h"

namespace cmaesig {
namespace {

using testing::all_permutations;
using testing::query_from_rows;

// Long-hand Plackett-Luce probability of a best-first order.
double pl_probability(const std::vector<double>& rewards, const std::vector<std::size_t>& order,
                      double beta) {
  double p = 1.0;
  for (std::size_t stage = 0; stage < order.size(); ++stage) {
    double denom = 0.0;
    for (std::size_t j = stage; j < order.size(); ++j) denom += std::exp(beta * rewards[order[j]]);
    p *= std::exp(beta * rewards[order[stage]]) / denom;
  }
  return p;
}

TEST(Reward, BasisProjectionAndZeroWeights) {
  EXPECT_DOUBLE_EQ(reward(Vector{{1.0, 0.0}}, Vector{{0.5, 9.0}}), 0.5);
  EXPECT_EQ(reward(Vector::Zero(4), Vector{{3.0, -2.0, 7.0, 1.0}}), 0.0);
}

TEST(Reward, MatchesLongHandSum) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = testing::uniform_matrix(2, 5, rng);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += m(0, i) * m(1, i);
    EXPECT_NEAR(reward(m.row(0).transpose(), m.row(1).transpose()), sum, 1e-15);
  }
}

TEST(Reward, DimensionMismatchThrows) {
  EXPECT_THROW(reward(Vector::Zero(2), Vector::Zero(3)), std::invalid_argument);
}

TEST(ChoiceModel, RejectsInvalidBeta) {
  EXPECT_THROW(ChoiceModel(-1.0), std::invalid_argument);
  EXPECT_THROW(ChoiceModel(std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_NO_THROW(ChoiceModel(0.0));
}

TEST(SelectionProbabilities, ZeroBetaIsUniform) {
  const ChoiceModel m(0.0);
  const auto p = m.selection_probabilities_from_rewards(std::vector<double>{3.0, -1.0, 8.0});
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(SelectionProbabilities, IdenticalItemsSplitEvenly) {
  const ChoiceModel m(1.0);
  const Query q = query_from_rows(Matrix{{0.3, -0.2}, {0.3, -0.2}});
  const auto p = m.selection_probabilities(Vector{{0.7, 0.1}}, q);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(SelectionProbabilities, TwoItemExample) {
  const ChoiceModel m(1.0);
  const Query q = query_from_rows(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  const auto p = m.selection_probabilities(Vector{{1.0, 0.0}}, q);
  const double e = std::numbers::e;
  EXPECT_NEAR(p[0], e / (1.0 + e), 1e-12);
  EXPECT_NEAR(p[1], 1.0 / (1.0 + e), 1e-12);
  EXPECT_NEAR(p[0], 0.73106, 1e-5);
}

TEST(SelectionProbabilities, StableForHugeRewards) {
  const ChoiceModel m(1.0);
  const auto p = m.selection_probabilities_from_rewards(std::vector<double>{1000.0, 999.0});
  EXPECT_NEAR(p[0], std::numbers::e / (1.0 + std::numbers::e), 1e-12);
}

TEST(SelectionProbabilities, NonFiniteRewardThrows) {
  const ChoiceModel m(1.0);
  EXPECT_THROW(m.selection_probabilities_from_rewards(std::vector<double>{1.0, NAN}),
               std::invalid_argument);
  EXPECT_THROW(m.selection_probabilities_from_rewards(std::vector<double>{}),
               std::invalid_argument);
}

TEST(SelectionProbabilities, Properties) {
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double beta = std::abs(n(rng));
    std::vector<double> r(5);
    for (auto& v : r) v = n(rng);
    const ChoiceModel m(beta);
    const auto p = m.selection_probabilities_from_rewards(r);
    double sum = 0.0;
    for (double v : p) {
      EXPECT_GT(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);

    // Shift invariance.
    std::vector<double> shifted = r;
    for (auto& v : shifted) v += 17.25;
    const auto ps = m.selection_probabilities_from_rewards(shifted);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], ps[i], 1e-12);

    // Scaling omega by c equals scaling beta by c.
    const double c = 0.5 + std::abs(n(rng));
    std::vector<double> scaled = r;
    for (auto& v : scaled) v *= c;
    const auto pw = m.selection_probabilities_from_rewards(scaled);
    const auto pb = ChoiceModel(beta * c).selection_probabilities_from_rewards(r);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(pw[i], pb[i], 1e-12);

    // Permutation equivariance.
    const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
    std::vector<double> permuted(5);
    for (std::size_t i = 0; i < 5; ++i) permuted[i] = r[perm[i]];
    const auto pp = m.selection_probabilities_from_rewards(permuted);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(pp[i], p[perm[i]], 1e-15);
  }
}

TEST(RankingLogLikelihood, Examples) {
  const ChoiceModel uniform(0.0);
  EXPECT_EQ(uniform.ranking_log_likelihood_from_rewards(std::vector<double>{4.0},
                                                        std::vector<std::size_t>{0}),
            0.0);
  EXPECT_NEAR(uniform.ranking_log_likelihood_from_rewards(std::vector<double>{1.0, 2.0, 3.0},
                                                          std::vector<std::size_t>{2, 0, 1}),
              std::log(1.0 / 3.0) + std::log(0.5), 1e-12);
  EXPECT_NEAR(std::log(1.0 / 3.0) + std::log(0.5), -1.79176, 1e-5);

  const ChoiceModel m(1.0);
  const Query q = query_from_rows(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  const double ll = m.ranking_log_likelihood(Vector{{1.0, 0.0}}, q, Ranking({0, 1}));
  EXPECT_NEAR(ll, std::log(std::numbers::e / (1.0 + std::numbers::e)), 1e-12);
  EXPECT_NEAR(ll, -0.31326, 1e-5);
}

TEST(RankingLogLikelihood, MatchesLongHandProduct) {
  Rng rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t k = 1; k <= 5; ++k) {
    std::vector<double> r(k);
    for (auto& v : r) v = n(rng);
    const ChoiceModel m(1.7);
    for (const auto& order : all_permutations(k)) {
      EXPECT_NEAR(m.ranking_log_likelihood_from_rewards(r, order),
                  std::log(pl_probability(r, order, 1.7)), 1e-12);
    }
  }
}

TEST(RankingLogLikelihood, SumsToOneOverPermutations) {
  Rng rng(8);
  std::normal_distribution<double> n(0.0, 1.5);
  for (std::size_t k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> r(k);
      for (auto& v : r) v = n(rng);
      const ChoiceModel m(std::abs(n(rng)));
      double total = 0.0;
      for (const auto& order : all_permutations(k)) {
        total += std::exp(m.ranking_log_likelihood_from_rewards(r, order));
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << "K=" << k;
    }
  }
}

TEST(RankingLogLikelihood, RejectsMismatchedRanking) {
  const ChoiceModel m(1.0);
  const Query q = query_from_rows(Matrix{{1.0}, {2.0}, {3.0}});
  EXPECT_THROW(m.ranking_log_likelihood(Vector{{1.0}}, q, Ranking({1, 0})), std::invalid_argument);
}

TEST(Ranking, RejectsNonPermutations) {
  EXPECT_THROW(Ranking({0, 0, 2}), std::invalid_argument);
  EXPECT_THROW(Ranking({1, 2, 3}), std::invalid_argument);
  EXPECT_NO_THROW(Ranking({2, 0, 1}));
}

std::map<std::vector<std::size_t>, double> frequencies(const ChoiceModel& m,
                                                       const std::vector<double>& r, int draws,
                                                       std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::vector<std::size_t>, double> f;
  for (int i = 0; i < draws; ++i) f[m.sample_ranking_from_rewards(r, rng).order()] += 1.0 / draws;
  return f;
}

TEST(SampleRanking, ZeroBetaIsUniformOverPermutations) {
  const auto f = frequencies(ChoiceModel(0.0), {0.1, 0.9, -0.4}, 60000, 21);
  ASSERT_EQ(f.size(), 6u);
  for (const auto& [order, freq] : f) EXPECT_NEAR(freq, 1.0 / 6.0, 0.01);
}

TEST(SampleRanking, LargeBetaIsNearlyDeterministic) {
  const auto f = frequencies(ChoiceModel(100.0), {0.0, 1.0, 0.5}, 10000, 4);
  EXPECT_GE(f.at({1, 2, 0}), 0.99);
}

TEST(SampleRanking, MatchesExactPlackettLuce) {
  const std::vector<double> r = {0.8, -0.3, 0.1};
  const auto f = frequencies(ChoiceModel(1.0), r, 100000, 99);
  double tv = 0.0;
  for (const auto& order : all_permutations(3)) {
    const double emp = f.contains(order) ? f.at(order) : 0.0;
    tv += 0.5 * std::abs(emp - pl_probability(r, order, 1.0));
  }
  EXPECT_LE(tv, 0.02);
}

TEST(SampleRanking, DeterministicGivenSeed) {
  const ChoiceModel m(1.0);
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(m.sample_ranking_from_rewards(std::vector<double>{0.2, 0.1, 0.5, -1.0}, a),
              m.sample_ranking_from_rewards(std::vector<double>{0.2, 0.1, 0.5, -1.0}, b));
  }
}

TEST(LogSumExp, EdgeCases) {
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(log_sum_exp(std::vector<double>{1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace cmaesig
