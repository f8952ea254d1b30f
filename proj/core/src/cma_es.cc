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

#include "cmaesig/cma_es.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace cmaesig {

std::size_t CmaParameters::default_lambda(std::size_t d) {
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(d))));
}

CmaParameters CmaParameters::defaults(std::size_t d, std::size_t lambda) {
  if (d == 0) throw std::invalid_argument("CMA-ES dimension must be >= 1");
  if (lambda < 2) throw std::invalid_argument("CMA-ES population size must be >= 2");
  CmaParameters p;
  p.dim = d;
  p.lambda = lambda;
  p.mu = lambda / 2;
  const double n = static_cast<double>(d);

  p.weights.resize(p.mu);
  const double base = std::log((static_cast<double>(lambda) + 1.0) / 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.mu; ++i) {
    p.weights[i] = base - std::log(static_cast<double>(i + 1));
    sum += p.weights[i];
  }
  double sum_sq = 0.0;
  for (double& w : p.weights) {
    w /= sum;
    sum_sq += w * w;
  }
  p.mu_eff = 1.0 / sum_sq;

  p.c_sigma = (p.mu_eff + 2.0) / (n + p.mu_eff + 5.0);
  p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (n + 1.0)) - 1.0) + p.c_sigma;
  p.c_c = (4.0 + p.mu_eff / n) / (n + 4.0 + 2.0 * p.mu_eff / n);
  p.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + p.mu_eff);
  p.c_mu = std::min(1.0 - p.c_1,
                    2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) / ((n + 2.0) * (n + 2.0) + p.mu_eff));
  p.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  return p;
}

CmaState CmaState::init(std::size_t d, double sigma0, std::size_t lambda,
                        std::optional<Vector> mean) {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw std::invalid_argument("CMA-ES initial step size must be positive");
  }
  if (lambda == 0) lambda = CmaParameters::default_lambda(std::max<std::size_t>(d, 1));
  CmaState s;
  s.params_ = CmaParameters::defaults(d, lambda);
  const auto n = static_cast<Eigen::Index>(d);
  s.mean_ = mean.value_or(Vector::Zero(n));
  if (s.mean_.size() != n || !s.mean_.allFinite()) {
    throw std::invalid_argument("CMA-ES initial mean has wrong dimension or non-finite entries");
  }
  s.cov_ = Matrix::Identity(n, n);
  s.sigma_ = sigma0;
  s.path_sigma_ = Vector::Zero(n);
  s.path_c_ = Vector::Zero(n);
  s.basis_ = Matrix::Identity(n, n);
  s.scales_ = Vector::Ones(n);
  return s;
}

CmaState CmaState::from_components(const CmaParameters& params, Vector mean, Matrix covariance,
                                   double sigma, Vector path_sigma, Vector path_c,
                                   std::size_t generation) {
  const auto n = static_cast<Eigen::Index>(params.dim);
  if (mean.size() != n || covariance.rows() != n || covariance.cols() != n ||
      path_sigma.size() != n || path_c.size() != n) {
    throw std::invalid_argument("CMA-ES components have inconsistent dimensions");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be > 0");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("CMA-ES covariance is not symmetric");
  }
  CmaState s;
  s.params_ = params;
  s.mean_ = std::move(mean);
  s.cov_ = std::move(covariance);
  s.sigma_ = sigma;
  s.path_sigma_ = std::move(path_sigma);
  s.path_c_ = std::move(path_c);
  s.generation_ = generation;
  s.decompose();
  if (s.scales_.minCoeff() <= 0.0) {
    throw std::invalid_argument("CMA-ES covariance is not positive-definite");
  }
  return s;
}

void CmaState::decompose() {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("CMA-ES covariance eigendecomposition failed");
  }
  basis_ = eig.eigenvectors();
  // Negative eigenvalues are reported as 0 so callers can detect them.
  scales_ = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

Matrix CmaState::sample_population(std::size_t n, Rng& rng) const {
  const auto d = static_cast<Eigen::Index>(dim());
  if (scales_.size() != d || scales_.minCoeff() <= 0.0) {
    throw std::runtime_error("CMA-ES covariance is not positive-definite; cannot sample");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(static_cast<Eigen::Index>(n), d);
  Vector z(d);
  const Matrix transform = basis_ * scales_.asDiagonal();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
    out.row(i) = (mean_ + sigma_ * (transform * z)).transpose();
  }
  return out;
}

CmaState CmaState::update(const Matrix& ranked) const {
  const auto& p = params_;
  const auto d = static_cast<Eigen::Index>(p.dim);
  if (static_cast<std::size_t>(ranked.rows()) != p.lambda || ranked.cols() != d) {
    throw std::invalid_argument("CMA-ES update expects a " + std::to_string(p.lambda) + " x " +
                                std::to_string(p.dim) + " ranked population, got " +
                                std::to_string(ranked.rows()) + " x " +
                                std::to_string(ranked.cols()));
  }
  if (!ranked.allFinite()) throw std::invalid_argument("CMA-ES population has non-finite entries");

  CmaState next = *this;
  const double n = static_cast<double>(p.dim);

  // Recombination.
  Matrix steps(static_cast<Eigen::Index>(p.mu), d);  // y_i = (x_i - m) / sigma
  Vector y_w = Vector::Zero(d);
  for (std::size_t i = 0; i < p.mu; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    steps.row(row) = (ranked.row(row) - mean_.transpose()) / sigma_;
    y_w += p.weights[i] * steps.row(row).transpose();
  }
  next.mean_ = mean_ + sigma_ * y_w;

  // Step-size path uses C^{-1/2} = B D^{-1} B^T.
  const Matrix inv_sqrt_c = basis_ * scales_.cwiseInverse().asDiagonal() * basis_.transpose();
  next.path_sigma_ = (1.0 - p.c_sigma) * path_sigma_ +
                     std::sqrt(p.c_sigma * (2.0 - p.c_sigma) * p.mu_eff) * (inv_sqrt_c * y_w);
  const double ps_norm = next.path_sigma_.norm();
  next.sigma_ = sigma_ * std::exp((p.c_sigma / p.d_sigma) * (ps_norm / p.chi_n - 1.0));

  // Stall indicator suppresses p_c growth while the step size is rising fast.
  const double gens = static_cast<double>(generation_ + 1);
  const double ps_debias = std::sqrt(1.0 - std::pow(1.0 - p.c_sigma, 2.0 * gens));
  const bool h_sigma = ps_norm / ps_debias < (1.4 + 2.0 / (n + 1.0)) * p.chi_n;
  next.path_c_ = (1.0 - p.c_c) * path_c_;
  if (h_sigma) next.path_c_ += std::sqrt(p.c_c * (2.0 - p.c_c) * p.mu_eff) * y_w;

  const double delta_h = h_sigma ? 0.0 : p.c_c * (2.0 - p.c_c);
  Matrix rank_mu = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < p.mu; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    rank_mu += p.weights[i] * steps.row(row).transpose() * steps.row(row);
  }
  // Positive weights only, so sum(w) = 1 in the decay factor.
  next.cov_ = (1.0 + p.c_1 * delta_h - p.c_1 - p.c_mu) * cov_ +
              p.c_1 * next.path_c_ * next.path_c_.transpose() + p.c_mu * rank_mu;
  next.cov_ = (0.5 * (next.cov_ + next.cov_.transpose())).eval();  // eval: transpose aliases
  next.generation_ = generation_ + 1;

  if (!next.cov_.allFinite() || !std::isfinite(next.sigma_) || !next.mean_.allFinite()) {
    throw std::invalid_argument("CMA-ES update produced non-finite state");
  }

  next.decompose();
  const double min_eig = next.scales_.minCoeff();
  if (min_eig * min_eig <= kEigenFloor) {
    // Reported once per optimizer run; regularizations() keeps the count.
    if (regularizations_ == 0) {
      std::clog << "cmaesig: covariance eigenvalue " << min_eig * min_eig
                << " at or below floor; adding " << kEigenFloor << " * I\n";
    }
    next.cov_.diagonal().array() += kEigenFloor;
    next.decompose();
    ++next.regularizations_;
  }
  return next;
}

}  // namespace cmaesig
