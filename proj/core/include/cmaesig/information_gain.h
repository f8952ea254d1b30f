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

#ifndef CMAESIG_INFORMATION_GAIN_H_
#define CMAESIG_INFORMATION_GAIN_H_

#include <span>
#include <string_view>
#include <vector>

#include "cmaesig/types.h"

namespace cmaesig {

// Which outcome of a query the estimate treats as the observation.
//   kFirstChoice: the single item the user would pick (softmax over the query)
//   kRanking:     the full Plackett-Luce ordering of the query
enum class IgEstimator { kFirstChoice, kRanking };
std::string_view estimator_name(IgEstimator e);  // "first-choice" / "ranking"
// Throws std::invalid_argument on an unknown name.
IgEstimator parse_estimator(std::string_view name);

// Sample estimate, in bits, of the mutual information between the user's
// first choice from a query and omega:
//
//   IG = (1/M) sum_m sum_i P(i|w_m) log2(M P(i|w_m) / sum_j P(i|w_j))
//
// `features` is K x d (one item per row), `omegas` is M x d. The value lies
// in [0, log2 min(K, M)] up to rounding. Throws std::invalid_argument if M == 0
// or the dimensions disagree.
double information_gain(const Matrix& features, const Matrix& omegas, double beta);

// Same estimate over a subset of columns of a precomputed M x D logit matrix
// (logits(m, c) = beta * w_m . phi_c).
double information_gain_from_logits(const Matrix& logits, std::span<const std::size_t> subset);

// Ranking analogue: the outcome is the whole ordering o of the query,
//
//   IG = (1/M) sum_m sum_o P(o|w_m) log2(M P(o|w_m) / sum_j P(o|w_j))
//
// with P the Plackett-Luce likelihood. Bounded by log2 min(K!, M). Enumerates
// all K! orderings, so K is capped at kMaxRankingIgItems.
inline constexpr std::size_t kMaxRankingIgItems = 7;
double ranking_information_gain(const Matrix& features, const Matrix& omegas, double beta);
double ranking_information_gain_from_logits(const Matrix& logits,
                                            std::span<const std::size_t> subset);

double information_gain_from_logits(const Matrix& logits, std::span<const std::size_t> subset,
                                    IgEstimator estimator);

// Builds a k-item subset of the candidate rows one item at a time. Each step
// adds the candidate that maximizes the estimate of the enlarged subset,
// scanning all remaining candidates; ties go to the lowest index. A single
// item carries no information, so the first pick is the candidate whose
// reward varies most across `omegas`. Single-item swaps against the 64 best
// runners-up of the final round are then applied while they strictly improve
// the estimate (at most four passes).
std::vector<std::size_t> greedy_information_gain(const Matrix& candidates, const Matrix& omegas,
                                                 double beta, std::size_t k,
                                                 IgEstimator estimator = IgEstimator::kRanking);

}  // namespace cmaesig

#endif  // CMAESIG_INFORMATION_GAIN_H_
