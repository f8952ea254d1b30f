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

#ifndef CMAESIG_TYPES_H_
#define CMAESIG_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmaesig {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Trajectory features Phi(xi) and linear reward weights omega share the same
// representation; the aliases document which role a vector plays.
using FeatureVector = Vector;
using WeightVector = Vector;

using Rng = std::mt19937_64;

// One candidate shown to the user.
struct QueryItem {
  std::string id;
  FeatureVector features;
  std::optional<std::string> label;
  std::optional<std::string> media_uri;
};

// A set of K >= 1 candidates with pairwise distinct ids and a common
// dimension. Construction validates both invariants.
class Query {
 public:
  Query() = default;
  explicit Query(std::vector<QueryItem> items);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t dim() const {
    return items_.empty() ? 0 : static_cast<std::size_t>(items_[0].features.size());
  }

  const QueryItem& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<QueryItem>& items() const { return items_; }

  // K x d matrix, row i = features of item i.
  Matrix feature_matrix() const;

 private:
  std::vector<QueryItem> items_;
};

// Best-first permutation of query indices: order()[0] is the most preferred.
class Ranking {
 public:
  Ranking() = default;
  // Throws std::invalid_argument unless `order` is a permutation of 0..n-1.
  explicit Ranking(std::vector<std::size_t> order);

  std::size_t size() const { return order_.size(); }
  std::size_t operator[](std::size_t i) const { return order_[i]; }
  const std::vector<std::size_t>& order() const { return order_; }

  bool valid_for(const Query& q) const { return order_.size() == q.size(); }

  friend bool operator==(const Ranking&, const Ranking&) = default;

 private:
  std::vector<std::size_t> order_;
};

// Per-dimension closed interval [low, high].
struct Bounds {
  Vector low;
  Vector high;

  static Bounds cube(std::size_t d, double low, double high);

  std::size_t dim() const { return static_cast<std::size_t>(low.size()); }
  // Throws std::invalid_argument unless low < high in every dimension.
  void validate() const;
  bool contains(const Vector& x, double slack = 0.0) const;
  Vector clip(const Vector& x) const;
};

void require_same_dim(const Vector& a, const Vector& b, const char* what);

}  // namespace cmaesig

#endif  // CMAESIG_TYPES_H_
