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

#include "cmaesig/service/session_manager.h"

#include <algorithm>
#include <random>

#include "cmaesig/format.h"
#include "cmaesig/service/errors.h"

namespace cmaesig::service {

namespace {

std::uint64_t random_u64() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json query_json(const std::string& id, const IssuedQuery& q) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : q.query.items()) items.push_back(item_json(item));
  return {{"session_id", id}, {"query_id", q.query_id}, {"items", items}};
}

// Non-negative integer; JSON parsers may tag small literals as signed.
bool is_index(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::optional<std::uint64_t> optional_query_id(const nlohmann::json& request) {
  auto it = request.find("query_id");
  if (it == request.end() || it->is_null()) return std::nullopt;
  if (!is_index(*it)) {
    throw ServiceError(ErrorCode::kInvalidArgument, "query_id must be a positive integer");
  }
  return it->get<std::uint64_t>();
}

}  // namespace

nlohmann::json item_json(const QueryItem& item) {
  nlohmann::json j = {{"id", item.id}, {"features", vector_json(item.features)}};
  if (item.label) j["label"] = *item.label;
  if (item.media_uri) j["media_uri"] = *item.media_uri;
  return j;
}

SessionManager::SessionManager(ManagerOptions options) : options_(std::move(options)) {
  std::error_code ec;
  std::filesystem::create_directories(options_.log_dir, ec);
  if (ec) {
    throw ServiceError(ErrorCode::kInternal, "cannot create session directory " +
                                                 options_.log_dir.string() + ": " + ec.message());
  }
  if (options_.default_dataset && !options_.datasets.contains(*options_.default_dataset)) {
    throw ServiceError(ErrorCode::kUnknownDataset,
                       "default dataset '" + *options_.default_dataset + "' is not registered");
  }
}

std::shared_ptr<const FeaturePool> SessionManager::resolve_pool(const PoolSpec& spec) {
  if (!spec.synthetic()) {
    auto it = options_.datasets.find(spec.dataset);
    if (it == options_.datasets.end()) {
      throw ServiceError(ErrorCode::kUnknownDataset, "unknown dataset '" + spec.dataset + "'");
    }
    return it->second;
  }
  const std::string key = std::to_string(spec.dim) + "/" + std::to_string(spec.size) + "/" +
                          format_double(spec.low) + "/" + format_double(spec.high) + "/" +
                          std::to_string(spec.seed);
  std::lock_guard lock(pools_mutex_);
  auto& slot = synthetic_pools_[key];
  if (!slot) {
    Rng rng(derive_seed(spec.seed, spec.dim, spec.size));
    slot = std::make_shared<const FeaturePool>(FeaturePool::generate_synthetic(
        spec.size, Bounds::cube(spec.dim, spec.low, spec.high), rng));
  }
  return slot;
}

std::size_t SessionManager::recover() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(options_.log_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::size_t restored = 0;
  for (const auto& path : files) {
    SessionLog log = read_log(path);
    if (path.stem().string() != log.session_id) {
      throw ServiceError(ErrorCode::kCorruptLog,
                         path.string() + ": file name does not match session id");
    }
    Session session =
        Session::replay(log, [this](const PoolSpec& spec) { return resolve_pool(spec); });
    auto entry = std::make_shared<Entry>(std::move(session), LogWriter::append_to(path));
    std::unique_lock lock(sessions_mutex_);
    sessions_[log.session_id] = std::move(entry);
    ++restored;
  }
  return restored;
}

std::string SessionManager::fresh_id() {
  for (;;) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(random_u64()));
    std::string id(buf);
    std::shared_lock lock(sessions_mutex_);
    if (!sessions_.contains(id) && !std::filesystem::exists(options_.log_dir / (id + ".jsonl"))) {
      return id;
    }
  }
}

std::string SessionManager::create(const nlohmann::json& request) {
  if (!request.is_object()) {
    throw ServiceError(ErrorCode::kInvalidArgument, "session request must be a JSON object");
  }
  SessionConfig config = SessionConfig::from_json(request);
  if (!request.contains("seed")) config.seed = random_u64();
  if (config.pool.synthetic() && !request.contains("d") && options_.default_dataset) {
    config.pool.dataset = *options_.default_dataset;
  }
  config.validate();
  auto pool = resolve_pool(config.pool);
  if (pool->size() < config.query_size) {
    throw ServiceError(ErrorCode::kInvalidArgument, "pool has fewer items than K");
  }

  const std::string id = fresh_id();
  const auto path = options_.log_dir / (id + ".jsonl");
  LogWriter writer = LogWriter::create(path, id);
  std::optional<Session> session;
  try {
    session.emplace(
        Session::create(id, config, pool, [&](const Event& e) { writer.append(e); }));
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw;
  }
  auto entry = std::make_shared<Entry>(std::move(*session), std::move(writer));
  std::unique_lock lock(sessions_mutex_);
  sessions_[id] = std::move(entry);
  return id;
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw ServiceError(ErrorCode::kUnknownSession, "unknown session '" + id + "'");
  }
  return it->second;
}

nlohmann::json SessionManager::query(const std::string& id) {
  auto entry = find(id);
  {
    // Fast path: an already pending query only needs a shared lock.
    std::shared_lock lock(entry->mutex);
    if (const auto& pending = entry->session.pending()) return query_json(id, *pending);
  }
  std::unique_lock lock(entry->mutex);
  const auto& q = entry->session.query([&](const Event& e) { entry->writer.append(e); });
  return query_json(id, q);
}

nlohmann::json SessionManager::submit_ranking(const std::string& id,
                                              const nlohmann::json& request) {
  auto entry = find(id);
  if (!request.is_object() || !request.contains("order") || !request["order"].is_array()) {
    throw ServiceError(ErrorCode::kInvalidRanking, "request needs an \"order\" array");
  }
  const auto& order = request["order"];
  const auto query_id = optional_query_id(request);
  const bool by_id = !order.empty() && order[0].is_string();
  std::vector<std::size_t> positions;
  std::vector<std::string> ids;
  for (const auto& v : order) {
    if (by_id && v.is_string()) {
      ids.push_back(v.get<std::string>());
    } else if (!by_id && is_index(v)) {
      positions.push_back(v.get<std::size_t>());
    } else {
      throw ServiceError(ErrorCode::kInvalidRanking,
                         "\"order\" must hold only query positions or only item ids");
    }
  }

  std::unique_lock lock(entry->mutex);
  Session& s = entry->session;
  const auto sink = [&](const Event& e) { entry->writer.append(e); };
  const std::uint64_t target = query_id.value_or(s.pending() ? s.pending()->query_id : 0);
  if (by_id) {
    s.submit_ranking_ids(ids, query_id, sink);
  } else {
    s.submit_ranking(positions, query_id, sink);
  }
  return {{"session_id", id},
          {"query_id", target},
          {"rankings", s.rankings()},
          {"estimate", vector_json(s.belief().estimate())},
          {"digest", s.digest()}};
}

nlohmann::json SessionManager::predicted_best(const std::string& id) {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  const Session& s = entry->session;
  const WeightVector w = s.belief().estimate();
  const auto& item = s.pool()[s.predicted_best()];
  return {{"session_id", id}, {"item", item_json(item)}, {"estimated_reward", w.dot(item.features)}};
}

nlohmann::json SessionManager::set_favorite(const std::string& id, const nlohmann::json& request) {
  auto entry = find(id);
  if (!request.is_object() || !request.contains("item_id") || !request["item_id"].is_string()) {
    throw ServiceError(ErrorCode::kInvalidArgument, "request needs a string \"item_id\"");
  }
  const std::string item = request["item_id"].get<std::string>();
  std::unique_lock lock(entry->mutex);
  entry->session.set_favorite(item, [&](const Event& e) { entry->writer.append(e); });
  return {{"session_id", id}, {"favorite", item}};
}

nlohmann::json SessionManager::summary(const std::string& id) {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  const Session& s = entry->session;
  nlohmann::json j = {{"session_id", id},
                      {"created", s.created_at()},
                      {"config", s.config().to_json()},
                      {"pool_size", s.pool().size()},
                      {"queries_issued", s.queries_issued()},
                      {"rankings", s.rankings()},
                      {"pending_query_id", nullptr},
                      {"favorite", nullptr},
                      {"estimate", vector_json(s.belief().estimate())},
                      {"digest", s.digest()}};
  if (s.pending()) j["pending_query_id"] = s.pending()->query_id;
  if (s.favorite()) j["favorite"] = *s.favorite();
  if (const auto& cma = s.strategy().cma()) {
    j["optimizer"] = {{"sigma", cma->sigma()},
                      {"generation", cma->generation()},
                      {"mean", vector_json(cma->mean())}};
  }
  return j;
}

std::string SessionManager::digest(const std::string& id) {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->session.digest();
}

std::vector<std::string> SessionManager::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  ids.reserve(sessions_.size());
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

}  // namespace cmaesig::service
