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

// Owns every live session, their logs and the item pools they draw from.
//
// Sessions are independent: each has its own mutex, so mutations within a
// session are serialized while different sessions proceed in parallel.
// Reads that do not generate a query take the session lock shared.

#ifndef CMAESIG_SERVICE_SESSION_MANAGER_H_
#define CMAESIG_SERVICE_SESSION_MANAGER_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmaesig/service/session.h"

namespace cmaesig::service {

struct ManagerOptions {
  // Directory holding one <session id>.jsonl per session. Created if missing.
  std::filesystem::path log_dir = "sessions";
  // Named pools that sessions may reference through "dataset".
  std::map<std::string, std::shared_ptr<const FeaturePool>> datasets;
  // Used when a create request names neither a dataset nor a dimension.
  std::optional<std::string> default_dataset;
};

class SessionManager {
 public:
  explicit SessionManager(ManagerOptions options);

  // Replays every log in log_dir. Returns the number of sessions restored.
  // Throws ServiceError(kCorruptLog) naming the first file that fails.
  std::size_t recover();

  // Returns the new session id. Errors: kInvalidArgument, kUnknownDataset.
  std::string create(const nlohmann::json& request);

  // Response bodies of the HTTP API (see http_api.h).
  nlohmann::json query(const std::string& id);
  nlohmann::json submit_ranking(const std::string& id, const nlohmann::json& request);
  nlohmann::json predicted_best(const std::string& id);
  nlohmann::json set_favorite(const std::string& id, const nlohmann::json& request);
  nlohmann::json summary(const std::string& id);

  std::string digest(const std::string& id);
  std::vector<std::string> session_ids() const;
  std::size_t size() const;
  const ManagerOptions& options() const { return options_; }

  std::shared_ptr<const FeaturePool> resolve_pool(const PoolSpec& spec);

 private:
  struct Entry {
    std::shared_mutex mutex;
    Session session;
    LogWriter writer;
    Entry(Session s, LogWriter w) : session(std::move(s)), writer(std::move(w)) {}
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string fresh_id();

  ManagerOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex pools_mutex_;
  std::map<std::string, std::shared_ptr<const FeaturePool>> synthetic_pools_;
};

// JSON view of a pool item.
nlohmann::json item_json(const QueryItem& item);

}  // namespace cmaesig::service

#endif  // CMAESIG_SERVICE_SESSION_MANAGER_H_
