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

#include <gtest/gtest.h>

#include "test_support.h"

namespace cmaesig {
namespace {

TEST(Alignment, Examples) {
  const Vector w{{0.3, -0.4, 1.2}};
  EXPECT_NEAR(alignment(w, w), 1.0, 1e-15);
  EXPECT_NEAR(alignment(-w, w), -1.0, 1e-15);
  EXPECT_NEAR(alignment(Vector{{1.0, 0.0}}, Vector{{0.0, 2.0}}), 0.0, 1e-15);
  EXPECT_EQ(alignment(Vector::Zero(3), w), 0.0);
  EXPECT_THROW(alignment(Vector::Zero(2), w), std::invalid_argument);
}

TEST(Quality, Examples) {
  const Vector truth{{1.0, 0.0}};
  EXPECT_DOUBLE_EQ(quality(testing::query_from_rows(Matrix{{0.7, 1.0}, {0.7, -1.0}}), truth), 0.7);
  EXPECT_DOUBLE_EQ(quality(testing::query_from_rows(Matrix{{0.0, 3.0}, {1.0, 2.0}}), truth), 0.5);

  Rng rng(1);
  const Matrix rows = testing::uniform_matrix(4, 5, rng);
  const Vector w = testing::uniform_matrix(5, 1, rng);
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) expected += rows(i, j) * w[j] / 4.0;
  }
  EXPECT_NEAR(quality(testing::query_from_rows(rows), w), expected, 1e-14);
}

TEST(Regret, Examples) {
  Rng rng(2);
  const auto pool = FeaturePool::generate_synthetic(20, Bounds::cube(3, -1.0, 1.0), rng);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector truth = testing::uniform_matrix(3, 1, rng);
    const Vector est = testing::uniform_matrix(3, 1, rng);
    EXPECT_EQ(regret(pool, truth, truth), 0.0);
    EXPECT_EQ(regret(pool, 2.5 * truth, truth), 0.0);

    // Exhaustive double argmax.
    std::size_t star = 0, chosen = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (truth.dot(pool[i].features) > truth.dot(pool[star].features)) star = i;
      if (est.dot(pool[i].features) > est.dot(pool[chosen].features)) chosen = i;
    }
    const double expected = truth.dot(pool[star].features) - truth.dot(pool[chosen].features);
    EXPECT_NEAR(regret(pool, est, truth), expected, 1e-15);
    EXPECT_GE(regret(pool, est, truth), 0.0);
  }
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<double>(30, 1.0)), 1.0);
  EXPECT_EQ(auc(std::vector<double>(30, 0.0)), 0.0);
  std::vector<double> ramp(30);
  for (int i = 0; i < 30; ++i) ramp[i] = i / 29.0;
  EXPECT_NEAR(auc(ramp), 0.5, 1.0 / 60.0);
  EXPECT_THROW(auc(std::vector<double>{}), std::invalid_argument);
}

}  // namespace
}  // namespace cmaesig
