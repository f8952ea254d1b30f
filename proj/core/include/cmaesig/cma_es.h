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

// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and combined
// rank-one / rank-mu covariance update, using the default strategy constants
// of Hansen's CMA-ES tutorial. The optimizer never evaluates an objective:
// callers sample a population, order it best-first by whatever preference
// signal they have, and hand the ordered points back to update().

#ifndef CMAESIG_CMA_ES_H_
#define CMAESIG_CMA_ES_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "cmaesig/types.h"

namespace cmaesig {

// Strategy constants derived from (d, lambda).
struct CmaParameters {
  std::size_t dim = 0;
  std::size_t lambda = 0;
  std::size_t mu = 0;
  std::vector<double> weights;  // positive, descending, sum 1
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;  // E||N(0, I)||

  static std::size_t default_lambda(std::size_t d);
  static CmaParameters defaults(std::size_t d, std::size_t lambda);
};

class CmaState {
 public:
  static constexpr double kEigenFloor = 1e-12;

  // lambda == 0 selects 4 + floor(3 ln d). Mean defaults to the origin.
  // Throws std::invalid_argument for d == 0, sigma0 <= 0, or lambda == 1.
  static CmaState init(std::size_t d, double sigma0, std::size_t lambda = 0,
                       std::optional<Vector> mean = std::nullopt);

  // Rebuilds a state from its raw components (used by replay and tests).
  // Throws std::invalid_argument if the covariance is not symmetric
  // positive-definite or any component is malformed.
  static CmaState from_components(const CmaParameters& params, Vector mean, Matrix covariance,
                                  double sigma, Vector path_sigma, Vector path_c,
                                  std::size_t generation);

  std::size_t dim() const { return params_.dim; }
  std::size_t lambda() const { return params_.lambda; }
  const CmaParameters& params() const { return params_; }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  double sigma() const { return sigma_; }
  const Vector& path_sigma() const { return path_sigma_; }
  const Vector& path_c() const { return path_c_; }
  std::size_t generation() const { return generation_; }
  // Number of times update() had to lift a collapsed eigenvalue.
  std::size_t regularizations() const { return regularizations_; }

  // n x d matrix of i.i.d. draws from N(m, sigma^2 C), one per row.
  Matrix sample_population(std::size_t n, Rng& rng) const;

  // `ranked` is lambda x d, best point first. Returns the next state.
  // Throws std::invalid_argument on a shape mismatch or non-finite entries.
  CmaState update(const Matrix& ranked) const;

 private:
  CmaState() = default;
  void decompose();

  CmaParameters params_;
  Vector mean_;
  Matrix cov_;
  double sigma_ = 0.0;
  Vector path_sigma_;
  Vector path_c_;
  std::size_t generation_ = 0;
  std::size_t regularizations_ = 0;
  // C = basis_ diag(scales_^2) basis_^T
  Matrix basis_;
  Vector scales_;
};

}  // namespace cmaesig

#endif  // CMAESIG_CMA_ES_H_
