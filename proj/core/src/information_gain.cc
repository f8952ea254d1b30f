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
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cmaesig {
namespace {

using ArrayX = Eigen::ArrayXd;
using Column = Eigen::Map<const ArrayX>;

// Both estimators work on unnormalized choice weights exp(logit - shift),
// one contiguous column of length M per query item. Any per-row shift
// cancels.
struct Weights {
  std::vector<const double*> cols;
  Eigen::Index m = 0;
  Column operator[](std::size_t i) const { return Column(cols[i], m); }
  std::size_t size() const { return cols.size(); }
};

// Scratch buffers for the ordering walk, reused across calls.
struct Workspace {
  std::vector<ArrayX> prefix;
  std::vector<ArrayX> inv;
  std::vector<std::size_t> order;
  void reserve(std::size_t k, Eigen::Index m) {
    if (prefix.size() < k + 1 || (!prefix.empty() && prefix[0].size() != m)) {
      prefix.assign(k + 1, ArrayX(m));
      inv.assign(k + 1, ArrayX(m));
    }
    order.resize(k);
  }
};

// sum over outcomes o of sum_m p log(M p / sum_j p_j), natural log.
template <typename Derived>
double mutual_information_term(const Eigen::ArrayBase<Derived>& p, double md) {
  const double column = p.sum();
  if (!(column > 0.0)) return 0.0;
  // 0 log 0 = 0: the floor keeps the log finite where p underflows.
  return (p * (p.max(std::numeric_limits<double>::min()) * (md / column)).log()).sum();
}

double first_choice_from_weights(const Weights& w) {
  const double md = static_cast<double>(w.m);
  ArrayX z = w[0];
  for (std::size_t i = 1; i < w.size(); ++i) z += w[i];
  const ArrayX inv = z.inverse();
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += mutual_information_term(w[i] * inv, md);
  return total / (md * std::numbers::ln2);
}

// Depth-first walk over the orderings of the items in order[0, n). Every
// stage multiplies the running probability (one entry per omega sample) by
// the chosen item's share of the remaining weight. prefix[n] holds the
// running probability at depth n; inv[n] is scratch.
double walk_orderings(const Weights& w, std::vector<std::size_t>& order,
                      std::size_t n, std::vector<ArrayX>& prefix, std::vector<ArrayX>& inv,
                      double md) {
  if (n == 1) return mutual_information_term(prefix[1], md);
  inv[n] = w[order[0]];
  for (std::size_t i = 1; i < n; ++i) inv[n] += w[order[i]];
  inv[n] = inv[n].inverse();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prefix[n - 1] = prefix[n] * w[order[i]] * inv[n];
    std::swap(order[i], order[n - 1]);
    total += walk_orderings(w, order, n - 1, prefix, inv, md);
    std::swap(order[i], order[n - 1]);
  }
  return total;
}

void check_ranking_size(std::size_t k) {
  if (k > kMaxRankingIgItems) {
    throw std::invalid_argument("ranking information gain supports at most " +
                                std::to_string(kMaxRankingIgItems) + " items");
  }
}

double ranking_from_weights(const Weights& w, Workspace& ws) {
  const std::size_t k = w.size();
  check_ranking_size(k);
  ws.reserve(k, w.m);
  ws.prefix[k].setOnes();
  for (std::size_t i = 0; i < k; ++i) ws.order[i] = i;
  const double md = static_cast<double>(w.m);
  return walk_orderings(w, ws.order, k, ws.prefix, ws.inv, md) / (md * std::numbers::ln2);
}

double from_weights(const Weights& w, IgEstimator estimator, Workspace& ws) {
  if (w.size() <= 1) return 0.0;
  return estimator == IgEstimator::kRanking ? ranking_from_weights(w, ws)
                                            : first_choice_from_weights(w);
}

// Weights for a subset, shifted by the subset's row maximum.
double from_logits(const Matrix& logits, std::span<const std::size_t> subset,
                   IgEstimator estimator) {
  if (logits.rows() == 0) {
    throw std::invalid_argument("information gain needs at least one omega sample");
  }
  if (subset.size() <= 1) return 0.0;
  for (auto c : subset) {
    if (c >= static_cast<std::size_t>(logits.cols())) {
      throw std::out_of_range("information gain: subset index out of range");
    }
  }
  const auto col = [&](std::size_t c) { return logits.col(static_cast<Eigen::Index>(c)).array(); };
  ArrayX hi = col(subset[0]);
  for (std::size_t i = 1; i < subset.size(); ++i) hi = hi.max(col(subset[i]));
  std::vector<ArrayX> storage;
  storage.reserve(subset.size());
  Weights w{{}, logits.rows()};
  for (auto c : subset) {
    storage.push_back((col(c) - hi).exp());
    w.cols.push_back(storage.back().data());
  }
  Workspace ws;
  return from_weights(w, estimator, ws);
}

double from_features(const Matrix& features, const Matrix& omegas, double beta,
                     IgEstimator estimator) {
  if (omegas.rows() == 0) {
    throw std::invalid_argument("information gain needs at least one omega sample");
  }
  if (features.cols() != omegas.cols()) {
    throw std::invalid_argument("information gain: feature and weight dimensions differ");
  }
  const Matrix logits = beta * (omegas * features.transpose());
  std::vector<std::size_t> all(static_cast<std::size_t>(features.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return from_logits(logits, all, estimator);
}

}  // namespace

std::string_view estimator_name(IgEstimator e) {
  return e == IgEstimator::kRanking ? "ranking" : "first-choice";
}

IgEstimator parse_estimator(std::string_view name) {
  if (name == "ranking") return IgEstimator::kRanking;
  if (name == "first-choice") return IgEstimator::kFirstChoice;
  throw std::invalid_argument("unknown IG estimator '" + std::string(name) +
                              "' (expected ranking or first-choice)");
}

double information_gain_from_logits(const Matrix& logits, std::span<const std::size_t> subset) {
  return from_logits(logits, subset, IgEstimator::kFirstChoice);
}

double ranking_information_gain_from_logits(const Matrix& logits,
                                            std::span<const std::size_t> subset) {
  return from_logits(logits, subset, IgEstimator::kRanking);
}

double information_gain_from_logits(const Matrix& logits, std::span<const std::size_t> subset,
                                    IgEstimator estimator) {
  return from_logits(logits, subset, estimator);
}

double information_gain(const Matrix& features, const Matrix& omegas, double beta) {
  return from_features(features, omegas, beta, IgEstimator::kFirstChoice);
}

double ranking_information_gain(const Matrix& features, const Matrix& omegas, double beta) {
  return from_features(features, omegas, beta, IgEstimator::kRanking);
}

std::vector<std::size_t> greedy_information_gain(const Matrix& candidates, const Matrix& omegas,
                                                 double beta, std::size_t k,
                                                 IgEstimator estimator) {
  const auto d_count = static_cast<std::size_t>(candidates.rows());
  if (k > d_count) throw std::invalid_argument("greedy selection: k exceeds candidate count");
  if (omegas.rows() == 0) {
    throw std::invalid_argument("greedy selection needs at least one omega sample");
  }
  if (candidates.cols() != omegas.cols()) {
    throw std::invalid_argument("greedy selection: feature and weight dimensions differ");
  }
  if (estimator == IgEstimator::kRanking) check_ranking_size(k);
  std::vector<std::size_t> chosen;
  if (k == 0) return chosen;
  chosen.reserve(k);

  const Matrix logits = beta * (omegas * candidates.transpose());
  std::vector<bool> used(d_count, false);

  // Spread of the logit across the posterior samples.
  std::size_t first = 0;
  double best_spread = -1.0;
  for (std::size_t c = 0; c < d_count; ++c) {
    const auto col = logits.col(static_cast<Eigen::Index>(c));
    const double mean = col.mean();
    const double spread = (col.array() - mean).square().sum();
    if (spread > best_spread) {
      best_spread = spread;
      first = c;
    }
  }
  chosen.push_back(first);
  used[first] = true;

  // Exponentiate once with a per-row shift shared by all candidates. When the
  // logit range is so wide that some weight underflows, fall back to shifting
  // per subset.
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  const Matrix weights = (logits.colwise() - row_max).array().exp().matrix();
  const bool shared_shift = weights.minCoeff() > std::numeric_limits<double>::min();

  Weights w{{}, weights.rows()};
  Workspace ws;
  auto score = [&](const std::vector<std::size_t>& subset) {
    if (!shared_shift) return from_logits(logits, subset, estimator);
    w.cols.clear();
    for (auto c : subset) w.cols.push_back(weights.col(static_cast<Eigen::Index>(c)).data());
    return from_weights(w, estimator, ws);
  };

  std::vector<std::size_t> trial;
  std::vector<double> last_gain(d_count, -std::numeric_limits<double>::infinity());
  double current = 0.0;
  while (chosen.size() < k) {
    std::size_t best = d_count;
    double best_gain = -std::numeric_limits<double>::infinity();
    trial = chosen;
    trial.push_back(0);
    for (std::size_t c = 0; c < d_count; ++c) {
      if (used[c]) continue;
      trial.back() = c;
      const double gain = score(trial);
      last_gain[c] = gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    chosen.push_back(best);
    used[best] = true;
    current = best_gain;
  }
  if (k < 2 || k == d_count) return chosen;

  // Single-swap local search over the strongest runners-up of the final
  // greedy round; the estimate is not submodular, so the greedy build can
  // stall below the best subset.
  constexpr std::size_t kSwapShortlist = 64;
  constexpr int kMaxSwapPasses = 4;
  constexpr double kMinImprovement = 1e-12;
  std::vector<std::size_t> shortlist;
  for (std::size_t c = 0; c < d_count; ++c) {
    if (!used[c]) shortlist.push_back(c);
  }
  if (shortlist.size() > kSwapShortlist) {
    std::partial_sort(shortlist.begin(), shortlist.begin() + kSwapShortlist, shortlist.end(),
                      [&](std::size_t a, std::size_t b) {
                        return last_gain[a] > last_gain[b] || (last_gain[a] == last_gain[b] && a < b);
                      });
    shortlist.resize(kSwapShortlist);
    std::sort(shortlist.begin(), shortlist.end());
  }
  for (int pass = 0; pass < kMaxSwapPasses; ++pass) {
    bool improved = false;
    for (std::size_t slot = 0; slot < k; ++slot) {
      trial = chosen;
      std::size_t best = d_count;
      double best_gain = current + kMinImprovement;
      for (std::size_t c : shortlist) {
        if (used[c]) continue;
        trial[slot] = c;
        const double gain = score(trial);
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      if (best == d_count) continue;
      // The displaced item becomes a swap candidate itself.
      std::replace(shortlist.begin(), shortlist.end(), best, chosen[slot]);
      used[chosen[slot]] = false;
      used[best] = true;
      chosen[slot] = best;
      current = best_gain;
      improved = true;
    }
    if (!improved) break;
  }
  return chosen;
}

}  // namespace cmaesig
