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

// cmaesig: benchmark runner, step-size sweep, synthetic pools and the
// session server.
//
//   cmaesig bench [--config run.json] [--users 100] [--dims 8,16,32] ...
//   cmaesig sweep [--sigmas 0.01,...] [--dims 8] ...
//   cmaesig serve [--host 127.0.0.1] [--port 8080] [--dataset pool.csv]
//   cmaesig pool  generate|check ...
//
// --config reads a JSON object whose keys are the subcommand's long flag
// names; flags given on the command line win. Every bench/sweep run writes
// manifest.json, which is itself a valid --config. Exit codes: 0 success,
// 1 usage, 2 runtime failure.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmaesig/feature_pool.h"
#include "cmaesig/format.h"
#include "cmaesig/service/http_api.h"
#include "cmaesig/service/session_manager.h"
#include "cmaesig/simulation.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cmaesig {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Thrown for configuration problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags of one subcommand together with typed getters, so the resolved
// configuration can be written back as JSON and read again by --config.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file of flag values (keys = long flag names)")
        ->check(CLI::ExistingFile);
  }

  template <typename T>
  CLI::Option* add(const std::string& name, T& value, const std::string& help) {
    getters_.emplace_back(name, [&value] { return json(value); });
    return app_->add_option("--" + name, value, help)->capture_default_str();
  }

  CLI::Option* flag(const std::string& name, bool& value, const std::string& help) {
    getters_.emplace_back(name, [&value] { return json(value); });
    return app_->add_flag("--" + name, value, help);
  }

  // Fills options not given on the command line from --config.
  void apply_config() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError(config_path_ + ": " + e.what());
    }
    // A manifest nests the flags under "config".
    if (j.is_object() && j.contains("config") && j.contains("command")) {
      if (j["command"] != app_->get_name()) {
        throw UsageError(config_path_ + " is a manifest for '" + j["command"].get<std::string>() +
                         "', not '" + app_->get_name() + "'");
      }
      j = j["config"];
    }
    if (!j.is_object()) throw UsageError(config_path_ + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      CLI::Option* opt = app_->get_option_no_throw("--" + key);
      if (opt == nullptr || key == "config") {
        throw UsageError(config_path_ + ": unknown key '" + key + "'");
      }
      if (opt->count() > 0) continue;  // command line wins
      std::vector<std::string> inputs;
      const auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (value.is_array()) {
        for (const auto& e : value) inputs.push_back(text(e));
      } else {
        inputs.push_back(text(value));
      }
      try {
        for (const auto& s : inputs) opt->add_result(s);
        opt->run_callback();
      } catch (const CLI::Error& e) {
        throw UsageError(config_path_ + ": key '" + key + "': " + e.what());
      }
    }
  }

  json resolved() const {
    json j = json::object();
    for (const auto& [name, get] : getters_) j[name] = get();
    return j;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::pair<std::string, std::function<json()>>> getters_;
};

// Flags shared by bench and sweep, bound to a SimulationConfig.
struct SimFlags {
  std::vector<std::string> strategies;
  std::string ig_estimator = "ranking";
  std::string selector = "greedy-ig";
  std::string out = "results";
  SimulationConfig config;

  void add(FlagSet& f) {
    f.add("strategies", strategies, "Comma-separated: ig, cma-es, cma-es-ig")->delimiter(',');
    f.add("dims", config.dims, "Comma-separated feature dimensions")->delimiter(',');
    f.add("users", config.users, "Simulated users per (strategy, d)");
    f.add("iterations", config.iterations, "Rankings per user (T)");
    f.add("K", config.query_size, "Items per query");
    f.add("D", config.candidates, "CMA-ES-IG candidate samples per query");
    f.add("M", config.posterior_samples, "Posterior samples used by IG");
    f.add("beta", config.beta, "Simulated-user rationality");
    f.add("sigma0", config.sigma0, "Initial CMA-ES step size");
    f.add("pool-size", config.pool_size, "Synthetic pool size");
    f.add("low", config.feature_low, "Lower feature bound");
    f.add("high", config.feature_high, "Upper feature bound");
    f.add("proposal-scale", config.sampler.proposal_scale, "MH proposal standard deviation");
    f.add("burn-in", config.sampler.burn_in, "MH burn-in steps");
    f.add("thinning", config.sampler.thinning, "MH steps between kept particles");
    f.add("particles", config.sampler.particles, "Belief particles");
    f.flag("surrogate-rank", config.surrogate_rank,
           "CMA-ES-IG: update on the first standard-lambda candidates ranked by the estimate");
    f.add("ig-estimator", ig_estimator, "IG objective: ranking or first-choice");
    f.add("selector", selector, "CMA-ES-IG query selection: greedy-ig or medoids");
    f.add("seed", config.seed, "Base seed");
    f.add("threads", config.threads, "Worker threads (0: all cores)");
    f.add("out", out, "Output directory");
  }

  // Converts the string-valued flags; throws UsageError on bad values.
  SimulationConfig resolve() const {
    SimulationConfig c = config;
    try {
      c.strategies.clear();
      for (const auto& s : strategies) c.strategies.push_back(parse_strategy(s));
      c.ig_estimator = parse_estimator(ig_estimator);
      c.selector = parse_selector(selector);
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory '" + dir + "'" +
                             (ec ? ": " + ec.message() : ""));
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    const std::vector<std::string>& outputs) {
  json m = {{"command", command},
            {"version", CMAESIG_VERSION},
            {"config", config},
            {"outputs", outputs}};
  write_file(dir / "manifest.json", [&](std::ostream& o) { o << m.dump(2) << '\n'; });
}

int cmd_bench(const SimFlags& flags, const FlagSet& set) {
  const SimulationConfig config = flags.resolve();
  const fs::path dir = prepare_out_dir(flags.out);
  const BenchmarkReport report = run_benchmark(config);
  write_file(dir / "curves.csv", [&](std::ostream& o) { write_curves_csv(o, report); });
  write_file(dir / "auc.csv", [&](std::ostream& o) { write_auc_csv(o, report); });
  write_manifest(dir, "bench", set.resolved(), {"curves.csv", "auc.csv"});
  print_auc_table(std::cout, report);
  return 0;
}

int cmd_sweep(const SimFlags& flags, const FlagSet& set, const std::vector<double>& sigmas) {
  const SimulationConfig config = flags.resolve();
  for (StrategyKind k : config.strategies) {
    if (k == StrategyKind::kInfoGain) throw UsageError("sweep varies sigma0; IG has no step size");
  }
  for (double s : sigmas) {
    if (!(s > 0.0)) throw UsageError("sigmas must be positive");
  }
  const fs::path dir = prepare_out_dir(flags.out);
  const SweepReport sweep = run_sigma_sweep(config, sigmas);
  write_file(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, sweep); });
  write_manifest(dir, "sweep", set.resolved(), {"sweep.csv"});
  for (std::size_t i = 0; i < sweep.sigmas.size(); ++i) {
    std::cout << "sigma0 = " << format_double(sweep.sigmas[i]) << '\n';
    print_auc_table(std::cout, sweep.reports[i]);
    std::cout << '\n';
  }
  return 0;
}

// serve: SIGINT/SIGTERM stop the server; every event is flushed as written.
int cmd_serve(const std::string& host, int port, const std::string& log_dir,
              const std::string& dataset) {
  service::ManagerOptions options;
  options.log_dir = log_dir;
  if (!dataset.empty()) {
    const std::string name = fs::path(dataset).stem().string();
    options.datasets[name] = std::make_shared<const FeaturePool>(FeaturePool::load(dataset));
    options.default_dataset = name;
  }
  service::SessionManager manager(std::move(options));
  const std::size_t recovered = manager.recover();

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);  // inherited by server threads

  service::HttpServer server(manager);
  if (!server.bind(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  std::clog << "cmaesig: serving on http://" << host << ':' << server.port() << " ("
            << recovered << " sessions recovered from " << log_dir << ")" << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  // listen() can also return on its own (socket error); release the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::clog << "cmaesig: stopped" << std::endl;
  return 0;
}

int cmd_pool_generate(std::size_t d, std::size_t size, double low, double high,
                      std::uint64_t seed, const std::string& out) {
  Rng rng(seed);
  const FeaturePool pool = FeaturePool::generate_synthetic(size, Bounds::cube(d, low, high), rng);
  pool.save(out);
  std::cout << "wrote " << pool.size() << " items (d=" << pool.dim() << ") to " << out << '\n';
  return 0;
}

int cmd_pool_check(const std::string& path) {
  const FeaturePool pool = FeaturePool::load(path);
  std::cout << path << ": " << pool.size() << " items, d=" << pool.dim() << '\n';
  for (std::size_t i = 0; i < pool.dim(); ++i) {
    std::cout << "  f" << i << " in [" << format_double(pool.bounds().low[i]) << ", "
              << format_double(pool.bounds().high[i]) << "]\n";
  }
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Preference-based query generation: benchmarks, sweeps and the session server"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CMAESIG_VERSION));

  auto* bench = app.add_subcommand("bench", "Simulated-user benchmark (curves.csv, auc.csv)");
  FlagSet bench_set(bench);
  SimFlags bench_flags;
  bench_flags.strategies = {"ig", "cma-es", "cma-es-ig"};
  bench_flags.add(bench_set);

  auto* sweep = app.add_subcommand("sweep", "Initial step-size sensitivity (sweep.csv)");
  FlagSet sweep_set(sweep);
  SimFlags sweep_flags;
  sweep_flags.strategies = {"cma-es", "cma-es-ig"};
  sweep_flags.config.dims = {8};
  sweep_flags.add(sweep_set);
  std::vector<double> sigmas = default_sigma_grid();
  sweep_set.add("sigmas", sigmas, "Comma-separated initial step sizes")->delimiter(',');

  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  FlagSet serve_set(serve);
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log_dir = "sessions";
  std::string dataset;
  serve_set.add("host", host, "Listen address");
  serve_set.add("port", port, "Listen port (0: any free port)")->check(CLI::Range(0, 65535));
  serve_set.add("log-dir", log_dir, "Directory of session event logs");
  serve_set.add("dataset", dataset, "Feature CSV served as the default pool (default: synthetic)");

  auto* pool = app.add_subcommand("pool", "Generate or check feature-pool CSV files");
  pool->require_subcommand(1);
  auto* generate = pool->add_subcommand("generate", "Write a synthetic uniform pool");
  std::size_t pool_d = 8, pool_size = FeaturePool::kDefaultSyntheticCount;
  double pool_low = -1.0, pool_high = 1.0;
  std::uint64_t pool_seed = 0;
  std::string pool_out;
  generate->add_option("--d", pool_d, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--size", pool_size, "Items")->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--low", pool_low, "Lower bound")->capture_default_str();
  generate->add_option("--high", pool_high, "Upper bound")->capture_default_str();
  generate->add_option("--seed", pool_seed, "Seed")->capture_default_str();
  generate->add_option("--out", pool_out, "Output CSV")->required();
  auto* check = pool->add_subcommand("check", "Load a pool CSV and print a summary");
  std::string check_path;
  check->add_option("path", check_path, "Pool CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
    if (*bench) bench_set.apply_config();
    if (*sweep) sweep_set.apply_config();
    if (*serve) serve_set.apply_config();
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*bench) return cmd_bench(bench_flags, bench_set);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_set, sigmas);
    if (*serve) return cmd_serve(host, port, log_dir, dataset);
    if (*generate) {
      if (!(pool_low < pool_high)) throw UsageError("--low must be below --high");
      return cmd_pool_generate(pool_d, pool_size, pool_low, pool_high, pool_seed, pool_out);
    }
    return cmd_pool_check(check_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace
}  // namespace cmaesig

int main(int argc, char** argv) { return cmaesig::run(argc, argv); }
