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

#include "cmaesig/feature_pool.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cmaesig/format.h"

namespace cmaesig {
namespace {

// Splits one CSV record. Handles quoted fields that span lines by pulling
// further lines from `in`.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (quoted) {
        if (!std::getline(in, line)) throw std::runtime_error("unterminated quoted field");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        field.push_back('\n');
        i = 0;
        continue;
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw std::runtime_error(where + ": invalid number '" + s + "'");
  }
  return v;
}

Bounds bounds_of(const std::vector<QueryItem>& items) {
  const auto d = items.at(0).features.size();
  Bounds b{items[0].features, items[0].features};
  for (const auto& item : items) {
    b.low = b.low.cwiseMin(item.features);
    b.high = b.high.cwiseMax(item.features);
  }
  // A constant dimension still needs a non-degenerate interval.
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(b.low[j] < b.high[j])) {
      b.low[j] -= 0.5;
      b.high[j] += 0.5;
    }
  }
  return b;
}

}  // namespace

FeaturePool::FeaturePool(std::vector<QueryItem> items, Bounds bounds)
    : items_(std::move(items)), bounds_(std::move(bounds)) {
  if (items_.empty()) throw std::invalid_argument("feature pool must not be empty");
  bounds_.validate();
  const auto d = static_cast<Eigen::Index>(bounds_.dim());
  features_.resize(static_cast<Eigen::Index>(items_.size()), d);
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    if (item.features.size() != d) {
      throw std::invalid_argument("pool item '" + item.id + "' has dimension " +
                                  std::to_string(item.features.size()) + ", expected " +
                                  std::to_string(d));
    }
    if (!bounds_.contains(item.features)) {
      throw std::invalid_argument("pool item '" + item.id + "' lies outside the pool bounds");
    }
    if (!index_.emplace(item.id, i).second) {
      throw std::invalid_argument("duplicate item id in pool: " + item.id);
    }
    features_.row(static_cast<Eigen::Index>(i)) = item.features.transpose();
  }
}

FeaturePool FeaturePool::generate_synthetic(std::size_t count, const Bounds& bounds, Rng& rng) {
  if (count == 0) throw std::invalid_argument("synthetic pool count must be >= 1");
  bounds.validate();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<QueryItem> items;
  items.reserve(count);
  const auto d = static_cast<Eigen::Index>(bounds.dim());
  for (std::size_t i = 0; i < count; ++i) {
    FeatureVector f(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      f[j] = bounds.low[j] + (bounds.high[j] - bounds.low[j]) * unif(rng);
    }
    items.push_back({std::to_string(i), std::move(f), std::nullopt, std::nullopt});
  }
  return FeaturePool(std::move(items), bounds);
}

FeaturePool FeaturePool::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file " + path.string());
  return parse(in, path.string());
}

FeaturePool FeaturePool::parse(std::istream& in, const std::string& source_name) {
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_record(in, header, line_no) || (header.size() == 1 && header[0].empty())) {
    throw std::runtime_error(source_name + ": empty feature file");
  }
  if (header.empty() || header[0] != "id") {
    throw std::runtime_error(source_name + ": header must start with 'id'");
  }
  std::size_t d = 0;
  while (1 + d < header.size() && header[1 + d] == "f" + std::to_string(d)) ++d;
  if (d == 0) throw std::runtime_error(source_name + ": header declares no feature columns f0..");
  int media_col = -1;
  int label_col = -1;
  for (std::size_t c = 1 + d; c < header.size(); ++c) {
    if (header[c] == "media_uri" && media_col < 0 && label_col < 0) {
      media_col = static_cast<int>(c);
    } else if (header[c] == "label" && label_col < 0) {
      label_col = static_cast<int>(c);
    } else {
      throw std::runtime_error(source_name + ": unexpected header column '" + header[c] + "'");
    }
  }

  std::vector<QueryItem> items;
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::string> row;
  while (read_record(in, row, line_no)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (row.size() != header.size()) {
      throw std::runtime_error(where + ": expected " + std::to_string(header.size()) +
                               " fields (d=" + std::to_string(d) + "), found " +
                               std::to_string(row.size()));
    }
    if (row[0].empty()) throw std::runtime_error(where + ": empty id");
    if (!seen.emplace(row[0], items.size()).second) {
      throw std::runtime_error(where + ": duplicate id '" + row[0] + "'");
    }
    QueryItem item;
    item.id = row[0];
    item.features.resize(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      item.features[static_cast<Eigen::Index>(j)] = parse_double(row[1 + j], where);
    }
    if (media_col >= 0 && !row[media_col].empty()) item.media_uri = row[media_col];
    if (label_col >= 0 && !row[label_col].empty()) item.label = row[label_col];
    items.push_back(std::move(item));
  }
  if (items.empty()) throw std::runtime_error(source_name + ": feature file has no rows");
  auto bounds = bounds_of(items);
  return FeaturePool(std::move(items), std::move(bounds));
}

void FeaturePool::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write feature file " + path.string());
  write(out);
  if (!out) throw std::runtime_error("failed writing feature file " + path.string());
}

void FeaturePool::write(std::ostream& out) const {
  bool has_media = false;
  bool has_label = false;
  for (const auto& item : items_) {
    has_media = has_media || item.media_uri.has_value();
    has_label = has_label || item.label.has_value();
  }
  out << "id";
  for (std::size_t j = 0; j < dim(); ++j) out << ",f" << j;
  if (has_media) out << ",media_uri";
  if (has_label) out << ",label";
  out << '\n';
  for (const auto& item : items_) {
    out << quote_if_needed(item.id);
    for (Eigen::Index j = 0; j < item.features.size(); ++j) {
      out << ',' << format_double(item.features[j]);
    }
    if (has_media) out << ',' << quote_if_needed(item.media_uri.value_or(""));
    if (has_label) out << ',' << quote_if_needed(item.label.value_or(""));
    out << '\n';
  }
}

std::optional<std::size_t> FeaturePool::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeaturePool::nearest(const FeatureVector& f) const {
  return nearest_excluding(f, {});
}

std::size_t FeaturePool::nearest_excluding(const FeatureVector& f,
                                           const std::vector<bool>& excluded) const {
  if (static_cast<std::size_t>(f.size()) != dim()) {
    throw std::invalid_argument("nearest: dimension mismatch");
  }
  std::size_t best = items_.size();
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    const double dist = (features_.row(static_cast<Eigen::Index>(i)).transpose() - f).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

std::size_t FeaturePool::argmax_reward(const WeightVector& w) const {
  if (static_cast<std::size_t>(w.size()) != dim()) {
    throw std::invalid_argument("argmax_reward: dimension mismatch");
  }
  const Vector rewards = features_ * w;
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < rewards.size(); ++i) {
    if (rewards[i] > rewards[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

}  // namespace cmaesig
