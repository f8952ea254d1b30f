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

#include "cmaesig/types.h"

#include <stdexcept>
#include <unordered_set>

namespace cmaesig {

Query::Query(std::vector<QueryItem> items) : items_(std::move(items)) {
  if (items_.empty()) {
    throw std::invalid_argument("query must contain at least one item");
  }
  const auto d = items_[0].features.size();
  if (d == 0) throw std::invalid_argument("query items must have dimension >= 1");
  std::unordered_set<std::string> seen;
  for (const auto& item : items_) {
    if (item.features.size() != d) {
      throw std::invalid_argument("query items have mismatched dimensions");
    }
    if (!item.features.allFinite()) {
      throw std::invalid_argument("query item '" + item.id + "' has non-finite features");
    }
    if (!seen.insert(item.id).second) {
      throw std::invalid_argument("duplicate item id in query: " + item.id);
    }
  }
}

Matrix Query::feature_matrix() const {
  Matrix m(items_.size(), dim());
  for (std::size_t i = 0; i < items_.size(); ++i) m.row(i) = items_[i].features.transpose();
  return m;
}

Ranking::Ranking(std::vector<std::size_t> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (auto idx : order_) {
    if (idx >= order_.size() || seen[idx]) {
      throw std::invalid_argument("ranking is not a permutation of the query indices");
    }
    seen[idx] = true;
  }
}

Bounds Bounds::cube(std::size_t d, double low, double high) {
  Bounds b{Vector::Constant(d, low), Vector::Constant(d, high)};
  b.validate();
  return b;
}

void Bounds::validate() const {
  if (low.size() != high.size() || low.size() == 0) {
    throw std::invalid_argument("bounds must have matching, nonzero dimension");
  }
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (!(low[i] < high[i])) {
      throw std::invalid_argument("bounds require low < high in dimension " + std::to_string(i));
    }
  }
}

bool Bounds::contains(const Vector& x, double slack) const {
  if (x.size() != low.size()) return false;
  return ((x.array() >= low.array() - slack) && (x.array() <= high.array() + slack)).all();
}

Vector Bounds::clip(const Vector& x) const { return x.cwiseMax(low).cwiseMin(high); }

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace cmaesig
