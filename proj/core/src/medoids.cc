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

#include "cmaesig/medoids.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmaesig {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest and second-nearest medoid distances per point.
struct Assignment {
  std::vector<std::size_t> nearest;  // position in the medoid list
  std::vector<double> d1;
  std::vector<double> d2;
};

Assignment assign(const Matrix& dist, const std::vector<std::size_t>& medoids) {
  const auto n = static_cast<std::size_t>(dist.rows());
  Assignment a{std::vector<std::size_t>(n, 0), std::vector<double>(n, kInf),
               std::vector<double>(n, kInf)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < medoids.size(); ++p) {
      const double dj = dist(static_cast<Eigen::Index>(medoids[p]), static_cast<Eigen::Index>(j));
      if (dj < a.d1[j]) {
        a.d2[j] = a.d1[j];
        a.d1[j] = dj;
        a.nearest[j] = p;
      } else if (dj < a.d2[j]) {
        a.d2[j] = dj;
      }
    }
  }
  return a;
}

}  // namespace

Matrix pairwise_distances(const Matrix& points) {
  const Vector sq = points.rowwise().squaredNorm();
  Matrix dist = -2.0 * (points * points.transpose());
  dist.colwise() += sq;
  dist.rowwise() += sq.transpose();
  dist = dist.cwiseMax(0.0).cwiseSqrt();
  dist.diagonal().setZero();
  // The Gram-matrix route is not bit-symmetric; force it.
  return 0.5 * (dist + dist.transpose());
}

double medoid_cost(const Matrix& distances, std::span<const std::size_t> medoids) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < distances.cols(); ++j) {
    double best = kInf;
    for (auto m : medoids) best = std::min(best, distances(static_cast<Eigen::Index>(m), j));
    total += best;
  }
  return total;
}

std::vector<std::size_t> select_medoids(const Matrix& points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k > n) {
    throw std::invalid_argument("select_medoids: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " candidates");
  }
  std::vector<std::size_t> medoids;
  if (k == 0) return medoids;
  if (k == n) {
    medoids.resize(n);
    std::iota(medoids.begin(), medoids.end(), std::size_t{0});
    return medoids;
  }

  const Matrix dist = pairwise_distances(points);
  std::vector<bool> is_medoid(n, false);

  // BUILD
  {
    std::size_t first = 0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double total = dist.row(static_cast<Eigen::Index>(i)).sum();
      if (total < best) {
        best = total;
        first = i;
      }
    }
    medoids.push_back(first);
    is_medoid[first] = true;
  }
  std::vector<double> nearest(n);
  for (std::size_t j = 0; j < n; ++j) {
    nearest[j] = dist(static_cast<Eigen::Index>(medoids[0]), static_cast<Eigen::Index>(j));
  }
  while (medoids.size() < k) {
    std::size_t pick = n;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        gain += std::max(0.0, nearest[j] - dist(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)));
      }
      if (gain > best_gain) {
        best_gain = gain;
        pick = c;
      }
    }
    medoids.push_back(pick);
    is_medoid[pick] = true;
    for (std::size_t j = 0; j < n; ++j) {
      nearest[j] = std::min(nearest[j], dist(static_cast<Eigen::Index>(pick), static_cast<Eigen::Index>(j)));
    }
  }

  // SWAP. For a fixed non-medoid o, the cost change of swapping it with the
  // medoid at position p splits into a term shared by every p plus a
  // correction from the points currently assigned to p, so all k swaps for o
  // are priced in one pass over the points.
  const double tolerance = 1e-12 * std::max(1.0, dist.maxCoeff()) * static_cast<double>(n);
  std::vector<double> delta(k);
  for (std::size_t iter = 0; iter < 100 * k + 100; ++iter) {
    const Assignment a = assign(dist, medoids);
    double best_delta = 0.0;
    std::size_t best_o = n;
    std::size_t best_p = k;
    for (std::size_t o = 0; o < n; ++o) {
      if (is_medoid[o]) continue;
      std::fill(delta.begin(), delta.end(), 0.0);
      double shared = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double doj = dist(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j));
        const double gain = std::min(doj - a.d1[j], 0.0);
        shared += gain;
        delta[a.nearest[j]] += std::min(doj, a.d2[j]) - a.d1[j] - gain;
      }
      for (std::size_t p = 0; p < k; ++p) {
        const double total = shared + delta[p];
        if (total < best_delta - tolerance) {
          best_delta = total;
          best_o = o;
          best_p = p;
        }
      }
    }
    if (best_o == n) break;
    is_medoid[medoids[best_p]] = false;
    is_medoid[best_o] = true;
    medoids[best_p] = best_o;
  }

  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

}  // namespace cmaesig
