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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.h"

namespace cmaesig {
namespace {

using testing::grid_posterior_mean;
using testing::query_from_rows;
using testing::sorted_ranking;

SamplerConfig with_particles(std::size_t m) {
  SamplerConfig c;
  c.particles = m;
  return c;
}

TEST(Belief, InitRejectsZeroDimension) {
  EXPECT_THROW(Belief::init_uniform(0, SamplerConfig{}, ChoiceModel(), 1), std::invalid_argument);
}

TEST(Belief, UniformPriorIsCenteredAndInsideTheBall) {
  const Belief b = Belief::init_uniform(8, with_particles(1000), ChoiceModel(), 42);
  EXPECT_TRUE(b.history().empty());
  EXPECT_EQ(b.particles().rows(), 1000);
  EXPECT_LE(b.estimate().norm(), 0.15);
  for (Eigen::Index i = 0; i < b.particles().rows(); ++i) {
    EXPECT_LE(b.particles().row(i).norm(), 1.0);
  }
}

TEST(Belief, UniformDiskRadialCdf) {
  const Belief b = Belief::init_uniform(2, with_particles(10000), ChoiceModel(), 7);
  std::vector<double> r;
  for (Eigen::Index i = 0; i < b.particles().rows(); ++i) r.push_back(b.particles().row(i).norm());
  std::sort(r.begin(), r.end());
  // Kolmogorov distance against F(r) = r^2.
  double ks = 0.0;
  const double n = static_cast<double>(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double f = r[i] * r[i];
    ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  EXPECT_LE(ks, 0.03);
}

TEST(Belief, UninformativeObservationKeepsThePrior) {
  Belief b = Belief::init_uniform(3, SamplerConfig{}, ChoiceModel(), 3);
  const Query q = query_from_rows(Matrix{{0.2, 0.4, -0.1}, {0.2, 0.4, -0.1}, {0.2, 0.4, -0.1}});
  b.observe(q, Ranking({2, 0, 1}));
  // Likelihood is constant in omega, so the log posterior is flat on the ball.
  Rng rng(1);
  const double ref = b.log_posterior(Vector::Zero(3));
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(b.log_posterior(sample_unit_ball(3, rng)), ref, 1e-12);
  }
}

TEST(Belief, PosteriorMeanMatchesGridQuadrature) {
  // d=2, five rankings of random K=4 queries by a simulated user.
  int close = 0;
  constexpr int kSeeds = 5;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(100 + seed);
    const WeightVector truth = sample_unit_sphere(2, rng);
    const ChoiceModel model(1.0);
    Belief b = Belief::init_uniform(2, with_particles(1000), model, 500 + seed);
    for (int t = 0; t < 5; ++t) {
      const Query q = query_from_rows(testing::uniform_matrix(4, 2, rng));
      b.observe(q, model.sample_ranking(truth, q, rng));
    }
    const Vector oracle = grid_posterior_mean(b.history(), 1.0);
    const double err = (b.estimate() - oracle).norm();
    EXPECT_LE(err, 0.1) << "seed " << seed;
    if (err <= 0.1) ++close;
  }
  EXPECT_EQ(close, kSeeds);
}

TEST(Belief, LogPosteriorIsStageOrderInvariant) {
  Rng rng(9);
  Belief b = Belief::init_uniform(3, SamplerConfig{}, ChoiceModel(2.0), 1);
  const Query q = query_from_rows(testing::uniform_matrix(4, 3, rng));
  const Ranking r({1, 3, 0, 2});
  b.observe(q, r);
  for (int i = 0; i < 20; ++i) {
    const WeightVector w = sample_unit_ball(3, rng);
    // Stage factors multiplied last-to-first.
    double lp = 0.0;
    for (std::size_t stage = r.size(); stage-- > 0;) {
      double denom = 0.0;
      for (std::size_t j = stage; j < r.size(); ++j) denom += std::exp(2.0 * w.dot(q[r[j]].features));
      lp += 2.0 * w.dot(q[r[stage]].features) - std::log(denom);
    }
    EXPECT_NEAR(b.log_posterior(w), lp, 1e-12);
  }
  EXPECT_EQ(b.log_posterior(Vector{{1.0, 1.0, 0.0}}), -std::numeric_limits<double>::infinity());
}

TEST(Belief, ParticlesStayInBallWithFiniteLogPosterior) {
  Rng rng(12);
  const ChoiceModel model(5.0);
  Belief b = Belief::init_uniform(4, SamplerConfig{}, model, 12);
  const WeightVector truth = sample_unit_sphere(4, rng);
  for (int t = 0; t < 15; ++t) {
    const Query q = query_from_rows(testing::uniform_matrix(4, 4, rng));
    b.observe(q, model.sample_ranking(truth, q, rng));
    ASSERT_EQ(b.particles().rows(), 100);
    for (Eigen::Index i = 0; i < b.particles().rows(); ++i) {
      const WeightVector p = b.particles().row(i).transpose();
      EXPECT_LE(p.norm(), 1.0);
      EXPECT_TRUE(std::isfinite(b.log_posterior(p)));
    }
  }
  EXPECT_EQ(b.history().size(), 15u);
}

TEST(Belief, ConsistentRankingsRotateTheMeanTowardTruth) {
  constexpr int kTrials = 40;
  int improved = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(1000 + trial);
    const WeightVector truth = sample_unit_sphere(4, rng);
    Belief b = Belief::init_uniform(4, SamplerConfig{}, ChoiceModel(), 2000 + trial);
    double first = 0.0;
    for (int t = 0; t < 10; ++t) {
      const Query q = query_from_rows(testing::uniform_matrix(4, 4, rng));
      b.observe(q, sorted_ranking(q, truth));
      if (t == 0) first = testing::cosine(b.estimate(), truth);
    }
    if (testing::cosine(b.estimate(), truth) > first) ++improved;
  }
  EXPECT_GE(improved, kTrials * 9 / 10);
}

TEST(Belief, RepeatedObservationDoesNotWidenThePosterior) {
  constexpr int kTrials = 40;
  int widened = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(300 + trial);
    const ChoiceModel model(3.0);
    const WeightVector truth = sample_unit_sphere(2, rng);
    const Query q = query_from_rows(testing::uniform_matrix(4, 2, rng));
    const Ranking r = model.sample_ranking(truth, q, rng);
    Belief b = Belief::init_uniform(2, with_particles(1000), model, 400 + trial);
    const auto trace = [&] {
      const Matrix centered = b.particles().rowwise() - b.particles().colwise().mean();
      return centered.squaredNorm() / static_cast<double>(centered.rows() - 1);
    };
    b.observe(q, r);
    const double once = trace();
    b.observe(q, r);
    if (trace() > once) ++widened;
  }
  EXPECT_LE(widened, kTrials / 20);
}

TEST(Belief, ObserveValidatesInput) {
  Belief b = Belief::init_uniform(2, SamplerConfig{}, ChoiceModel(), 1);
  const Query q = query_from_rows(Matrix{{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_THROW(b.observe(q, Ranking({0, 1, 2})), std::invalid_argument);
  EXPECT_THROW(b.observe(query_from_rows(Matrix{{0.1}, {0.2}}), Ranking({0, 1})),
               std::invalid_argument);
  EXPECT_TRUE(b.history().empty());
}

TEST(Belief, ObserveIsDeterministic) {
  Rng rng(5);
  const Query q = query_from_rows(testing::uniform_matrix(3, 3, rng));
  Belief a = Belief::init_uniform(3, SamplerConfig{}, ChoiceModel(), 77);
  Belief b = Belief::init_uniform(3, SamplerConfig{}, ChoiceModel(), 77);
  a.observe(q, Ranking({2, 1, 0}));
  b.observe(q, Ranking({2, 1, 0}));
  EXPECT_EQ(a.particles(), b.particles());
}

TEST(BeliefSample, ResamplingContract) {
  Rng rng(2);
  Belief b = Belief::init_uniform(3, SamplerConfig{}, ChoiceModel(), 2);
  b.observe(query_from_rows(testing::uniform_matrix(4, 3, rng)), Ranking({3, 1, 2, 0}));
  EXPECT_EQ(b.sample(0, rng).rows(), 0);

  const auto is_particle = [&](const Vector& v) {
    for (Eigen::Index i = 0; i < b.particles().rows(); ++i) {
      if (b.particles().row(i).transpose() == v) return true;
    }
    return false;
  };
  const Matrix few = b.sample(50, rng);
  const Matrix many = b.sample(1000, rng);
  for (Eigen::Index i = 0; i < few.rows(); ++i) EXPECT_TRUE(is_particle(few.row(i).transpose()));
  for (Eigen::Index i = 0; i < many.rows(); ++i) EXPECT_TRUE(is_particle(many.row(i).transpose()));
  const Vector diff = many.colwise().mean().transpose() - b.estimate();
  EXPECT_LE(diff.cwiseAbs().maxCoeff(), 0.02);
}

TEST(BeliefEstimate, SingleParticleIsItsOwnMean) {
  const Belief b = Belief::init_uniform(5, with_particles(1), ChoiceModel(), 3);
  EXPECT_EQ(b.estimate(), Vector(b.particles().row(0).transpose()));
}

}  // namespace
}  // namespace cmaesig
