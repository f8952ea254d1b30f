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

#ifndef CMAESIG_MEDOIDS_H_
#define CMAESIG_MEDOIDS_H_

#include <span>
#include <vector>

#include "cmaesig/types.h"

namespace cmaesig {

// n x n Euclidean distance matrix between the rows of `points`.
Matrix pairwise_distances(const Matrix& points);

// Sum over points of the distance to the closest medoid.
double medoid_cost(const Matrix& distances, std::span<const std::size_t> medoids);

// k-medoids (PAM) over the rows of `points` under Euclidean distance.
// BUILD adds medoids greedily by largest cost reduction; SWAP then applies
// the best medoid/non-medoid exchange until none lowers the total cost.
// Every step breaks ties by lowest index, so the result depends only on the
// row order. Returns k distinct indices in ascending order.
// Throws std::invalid_argument if k > rows.
std::vector<std::size_t> select_medoids(const Matrix& points, std::size_t k);

}  // namespace cmaesig

#endif  // CMAESIG_MEDOIDS_H_
