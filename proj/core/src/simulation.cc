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

#include "cmaesig/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cmaesig/format.h"
#include "cmaesig/metrics.h"

namespace cmaesig {
namespace {

constexpr std::uint64_t kPoolStream = 0x706f6f6cULL;
constexpr std::uint64_t kUserStream = 0x75736572ULL;

CurveSummary summarize(const std::vector<EpisodeResult>& episodes, Metric metric) {
  CurveSummary s;
  if (episodes.empty()) return s;
  const std::size_t t_count = episodes[0].curve(metric).size();
  const double n = static_cast<double>(episodes.size());
  s.mean.assign(t_count, 0.0);
  s.std_error.assign(t_count, 0.0);
  for (std::size_t t = 0; t < t_count; ++t) {
    double sum = 0.0;
    for (const auto& e : episodes) sum += e.curve(metric)[t];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& e : episodes) {
      const double dv = e.curve(metric)[t] - mean;
      ss += dv * dv;
    }
    s.mean[t] = mean;
    s.std_error[t] = episodes.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  s.auc = t_count > 0 ? auc(s.mean) : 0.0;
  return s;
}

// Runs fn(i) for i in [0, count) on `threads` workers. Results must be
// written to preassigned slots so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kAlignment:
      return "alignment";
    case Metric::kRegret:
      return "regret";
    case Metric::kQuality:
      return "quality";
  }
  return "?";
}

void SimulationConfig::validate() const {
  if (dims.empty() || strategies.empty()) {
    throw std::invalid_argument("simulation needs at least one dimension and one strategy");
  }
  for (auto d : dims) {
    if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  }
  if (users == 0) throw std::invalid_argument("user count must be >= 1");
  if (pool_size < query_size) throw std::invalid_argument("pool size must be >= K");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  sampler.validate();
  for (auto kind : strategies) {
    for (auto d : dims) strategy_config(kind, d).validate();
  }
}

StrategyConfig SimulationConfig::strategy_config(StrategyKind kind, std::size_t d) const {
  StrategyConfig c;
  c.kind = kind;
  c.query_size = query_size;
  c.candidates = candidates;
  c.posterior_samples = posterior_samples;
  c.sigma0 = sigma0;
  c.beta = beta;
  c.bounds = Bounds::cube(d, feature_low, feature_high);
  c.surrogate_rank = surrogate_rank;
  c.ig_estimator = ig_estimator;
  c.selector = selector;
  return c;
}

SimulatedUser SimulatedUser::sample(std::size_t d, double beta, Rng& rng) {
  return SimulatedUser{sample_unit_sphere(d, rng), beta};
}

const std::vector<double>& EpisodeResult::curve(Metric m) const {
  switch (m) {
    case Metric::kAlignment:
      return alignment;
    case Metric::kRegret:
      return regret;
    case Metric::kQuality:
      return quality;
  }
  throw std::logic_error("unknown metric");
}

EpisodeResult run_episode(const StrategyConfig& strategy, const SamplerConfig& sampler,
                          const SimulatedUser& user, std::shared_ptr<const FeaturePool> pool,
                          std::size_t iterations, std::uint64_t seed) {
  const std::size_t d = strategy.dim();
  if (static_cast<std::size_t>(user.omega_star.size()) != d) {
    throw std::invalid_argument("simulated user dimension differs from strategy");
  }
  Rng query_rng(derive_seed(seed, 0));
  Rng user_rng(derive_seed(seed, 1));
  const ChoiceModel model(strategy.beta);
  const ChoiceModel user_model(user.beta);
  Belief belief = Belief::init_uniform(d, sampler, model, derive_seed(seed, 2));
  QueryStrategy generator(strategy, pool, /*snap_to_pool=*/false);

  const std::size_t best = pool->argmax_reward(user.omega_star);
  const double best_reward = user.omega_star.dot((*pool)[best].features);

  EpisodeResult result;
  result.strategy = strategy.kind;
  result.dim = d;
  result.seed = seed;
  result.alignment.reserve(iterations);
  result.quality.reserve(iterations);
  result.regret.reserve(iterations);
  for (std::size_t t = 0; t < iterations; ++t) {
    const Query q = generator.next_query(belief, query_rng);
    const Ranking r = user_model.sample_ranking(user.omega_star, q, user_rng);
    belief.observe(q, r);
    generator.feedback(q, r, belief);
    const WeightVector estimate = belief.estimate();
    result.alignment.push_back(alignment(estimate, user.omega_star));
    result.quality.push_back(quality(q, user.omega_star));
    result.regret.push_back(regret(*pool, estimate, user.omega_star, best_reward));
  }
  return result;
}

const BenchmarkCell& BenchmarkReport::cell(StrategyKind kind, std::size_t d) const {
  for (const auto& c : cells) {
    if (c.strategy == kind && c.dim == d) return c;
  }
  throw std::out_of_range("benchmark report has no cell for " + std::string(strategy_name(kind)) +
                          " at d=" + std::to_string(d));
}

std::shared_ptr<const FeaturePool> simulation_pool(const SimulationConfig& config, std::size_t d) {
  Rng rng(derive_seed(config.seed, kPoolStream, d));
  return std::make_shared<const FeaturePool>(FeaturePool::generate_synthetic(
      config.pool_size, Bounds::cube(d, config.feature_low, config.feature_high), rng));
}

SimulatedUser simulation_user(const SimulationConfig& config, std::size_t d, std::size_t user) {
  Rng rng(derive_seed(config.seed, kUserStream, d, user));
  return SimulatedUser::sample(d, config.beta, rng);
}

BenchmarkReport run_benchmark(const SimulationConfig& config) {
  config.validate();
  BenchmarkReport report;
  report.config = config;

  std::map<std::size_t, std::shared_ptr<const FeaturePool>> pools;
  std::map<std::size_t, std::vector<SimulatedUser>> users;
  for (auto d : config.dims) {
    if (pools.count(d)) continue;
    pools[d] = simulation_pool(config, d);
    auto& list = users[d];
    for (std::size_t u = 0; u < config.users; ++u) list.push_back(simulation_user(config, d, u));
  }

  for (auto kind : config.strategies) {
    for (auto d : config.dims) {
      BenchmarkCell cell;
      cell.strategy = kind;
      cell.dim = d;
      cell.episodes.resize(config.users);
      report.cells.push_back(std::move(cell));
    }
  }

  const std::size_t per_cell = config.users;
  parallel_for(report.cells.size() * per_cell, config.threads, [&](std::size_t job) {
    auto& cell = report.cells[job / per_cell];
    const std::size_t u = job % per_cell;
    const std::uint64_t seed =
        derive_seed(config.seed, static_cast<std::uint64_t>(cell.strategy) + 1, cell.dim, u);
    cell.episodes[u] = run_episode(config.strategy_config(cell.strategy, cell.dim), config.sampler,
                                   users.at(cell.dim)[u], pools.at(cell.dim), config.iterations,
                                   seed);
  });

  for (auto& cell : report.cells) {
    for (auto m : kAllMetrics) cell.metrics[static_cast<int>(m)] = summarize(cell.episodes, m);
  }
  return report;
}

std::vector<double> default_sigma_grid() {
  constexpr double kLow = 0.01;
  constexpr double kHigh = 1.5;
  constexpr int kCount = 10;
  std::vector<double> grid(kCount);
  for (int i = 0; i < kCount; ++i) {
    grid[i] = kLow * std::pow(kHigh / kLow, static_cast<double>(i) / (kCount - 1));
  }
  grid.front() = kLow;
  grid.back() = kHigh;
  return grid;
}

SweepReport run_sigma_sweep(const SimulationConfig& base, std::span<const double> sigmas) {
  SweepReport sweep;
  for (double sigma : sigmas) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("sweep step sizes must be positive");
    }
  }
  for (double sigma : sigmas) {
    SimulationConfig config = base;
    config.sigma0 = sigma;
    sweep.sigmas.push_back(sigma);
    sweep.reports.push_back(run_benchmark(config));
  }
  return sweep;
}

SlopeEstimate slope_interval(const BenchmarkCell& cell, Metric metric) {
  std::vector<double> slopes;
  slopes.reserve(cell.episodes.size());
  for (const auto& e : cell.episodes) {
    const auto& y = e.curve(metric);
    const double n = static_cast<double>(y.size());
    if (y.size() < 2) continue;
    const double t_mean = (n + 1.0) / 2.0;
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const double dt = static_cast<double>(t + 1) - t_mean;
      sxy += dt * (y[t] - y_mean);
      sxx += dt * dt;
    }
    slopes.push_back(sxy / sxx);
  }
  SlopeEstimate est;
  if (slopes.empty()) return est;
  const double n = static_cast<double>(slopes.size());
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : slopes) ss += (s - mean) * (s - mean);
  const double se = slopes.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  est.slope = mean;
  est.low = mean - 1.96 * se;
  est.high = mean + 1.96 * se;
  return est;
}

void write_curves_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "strategy,d,t,metric,mean,stderr\n";
  for (const auto& cell : report.cells) {
    for (auto m : kAllMetrics) {
      const auto& s = cell.summary(m);
      for (std::size_t t = 0; t < s.mean.size(); ++t) {
        out << strategy_name(cell.strategy) << ',' << cell.dim << ',' << (t + 1) << ','
            << metric_name(m) << ',' << format_double(s.mean[t]) << ','
            << format_double(s.std_error[t]) << '\n';
      }
    }
  }
}

void write_auc_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "strategy,d,metric,auc\n";
  for (const auto& cell : report.cells) {
    for (auto m : kAllMetrics) {
      out << strategy_name(cell.strategy) << ',' << cell.dim << ',' << metric_name(m) << ','
          << format_double(cell.summary(m).auc) << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepReport& sweep) {
  out << "sigma,strategy,d,metric,auc\n";
  for (std::size_t i = 0; i < sweep.sigmas.size(); ++i) {
    for (const auto& cell : sweep.reports[i].cells) {
      for (auto m : kAllMetrics) {
        out << format_double(sweep.sigmas[i]) << ',' << strategy_name(cell.strategy) << ','
            << cell.dim << ',' << metric_name(m) << ',' << format_double(cell.summary(m).auc)
            << '\n';
      }
    }
  }
}

void print_auc_table(std::ostream& out, const BenchmarkReport& report) {
  const auto& dims = report.config.dims;
  const std::array<Metric, 3> order = {Metric::kAlignment, Metric::kRegret, Metric::kQuality};
  const std::array<const char*, 3> titles = {"Alignment (^)", "Regret (v)", "Quality (^)"};
  constexpr int kName = 10;
  constexpr int kCol = 8;
  const int group = kCol * static_cast<int>(dims.size());

  std::ostringstream line;
  line << std::left << std::setw(kName) << "";
  for (std::size_t g = 0; g < order.size(); ++g) {
    line << " | " << std::left << std::setw(group) << titles[g];
  }
  out << line.str() << '\n';
  line.str("");
  line << std::left << std::setw(kName) << "";
  for (std::size_t g = 0; g < order.size(); ++g) {
    line << " | ";
    for (auto d : dims) line << std::right << std::setw(kCol) << ("d=" + std::to_string(d));
  }
  out << line.str() << '\n' << std::string(line.str().size(), '-') << '\n';

  for (auto kind : report.config.strategies) {
    line.str("");
    line << std::left << std::setw(kName) << strategy_name(kind);
    for (auto m : order) {
      line << " | ";
      for (auto d : dims) {
        line << std::right << std::setw(kCol) << std::fixed << std::setprecision(3)
             << report.cell(kind, d).summary(m).auc;
      }
    }
    out << line.str() << '\n';
  }
}

}  // namespace cmaesig
