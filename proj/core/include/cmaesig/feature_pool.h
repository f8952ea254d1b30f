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

#ifndef CMAESIG_FEATURE_POOL_H_
#define CMAESIG_FEATURE_POOL_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmaesig/types.h"

namespace cmaesig {

// An immutable library of trajectory feature vectors.
//
// CSV layout (UTF-8, comma separated, '.' decimal point):
//
//   id,f0,f1,...,f{d-1}[,media_uri][,label]
//
// Fields containing a comma, quote or newline are double-quoted with inner
// quotes doubled. Bounds of a loaded pool are the per-dimension min/max.
class FeaturePool {
 public:
  static constexpr std::size_t kDefaultSyntheticCount = 10000;

  // Throws std::invalid_argument if items are empty, ids repeat, dimensions
  // disagree, or any vector lies outside `bounds`.
  FeaturePool(std::vector<QueryItem> items, Bounds bounds);

  // `count` i.i.d. uniform vectors inside `bounds`; ids are "0".."count-1".
  static FeaturePool generate_synthetic(std::size_t count, const Bounds& bounds, Rng& rng);

  static FeaturePool load(const std::filesystem::path& path);
  static FeaturePool parse(std::istream& in, const std::string& source_name = "<stream>");

  void save(const std::filesystem::path& path) const;
  void write(std::ostream& out) const;

  std::size_t dim() const { return bounds_.dim(); }
  std::size_t size() const { return items_.size(); }
  const Bounds& bounds() const { return bounds_; }
  const QueryItem& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<QueryItem>& items() const { return items_; }
  // size() x dim(), row i = items()[i].features.
  const Matrix& features() const { return features_; }

  // Index of the item with this id, if any.
  std::optional<std::size_t> find(const std::string& id) const;

  // Index minimizing Euclidean distance to f; ties go to the lowest index.
  std::size_t nearest(const FeatureVector& f) const;
  // As nearest(), skipping indices flagged in `excluded` (size() entries).
  // Returns size() if every item is excluded.
  std::size_t nearest_excluding(const FeatureVector& f, const std::vector<bool>& excluded) const;

  // Index maximizing w . phi; ties go to the lowest index.
  std::size_t argmax_reward(const WeightVector& w) const;

 private:
  std::vector<QueryItem> items_;
  Bounds bounds_;
  Matrix features_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cmaesig

#endif  // CMAESIG_FEATURE_POOL_H_
