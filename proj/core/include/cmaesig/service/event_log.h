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

// Append-only JSON-lines event log, one file per session.
//
// Line 1 is a header record {"format":"cmaesig-session-log","version":1,
// "session_id":...}. Every further line is one event:
//
//   {"seq":n,"type":"create"|"query"|"ranking"|"favorite",
//    "time":"2026-01-01T00:00:00.000Z","seed":s,"payload":{...}}
//
// seq starts at 0 and increases by one per event. "seed" is present on
// query events only: it is the rng seed the query was generated from.

#ifndef CMAESIG_SERVICE_EVENT_LOG_H_
#define CMAESIG_SERVICE_EVENT_LOG_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cmaesig::service {

inline constexpr const char* kLogFormat = "cmaesig-session-log";
inline constexpr int kLogVersion = 1;

enum class EventType { kCreate, kQuery, kRanking, kFavorite };

std::string_view event_type_name(EventType type);
// Throws ServiceError(kCorruptLog) on an unknown name.
EventType parse_event_type(std::string_view name);

struct Event {
  std::uint64_t seq = 0;
  EventType type = EventType::kCreate;
  std::string time;  // UTC, ISO 8601 with milliseconds
  std::optional<std::uint64_t> seed;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Event from_json(const nlohmann::json& j);
};

// Current wall-clock time in the log's timestamp format.
std::string utc_timestamp();

struct SessionLog {
  std::string session_id;
  std::vector<Event> events;
};

// Reads a whole log. Throws ServiceError(kCorruptLog) on a missing or
// mismatched header, unparsable lines or out-of-order sequence numbers. A
// torn final line (no trailing newline, invalid JSON) is ignored, since it
// can only come from a crash mid-append.
SessionLog read_log(const std::filesystem::path& path);

// Appends events to one session's log, flushing after every record.
class LogWriter {
 public:
  // Creates the file with its header. Throws ServiceError(kInternal) if the
  // file exists or cannot be created.
  static LogWriter create(const std::filesystem::path& path, const std::string& session_id);
  // Opens an existing log for appending.
  static LogWriter append_to(const std::filesystem::path& path);

  LogWriter(LogWriter&&) = default;
  LogWriter& operator=(LogWriter&&) = default;

  void append(const Event& event);
  const std::filesystem::path& path() const { return path_; }

 private:
  LogWriter(std::filesystem::path path, std::ofstream out);

  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace cmaesig::service

#endif  // CMAESIG_SERVICE_EVENT_LOG_H_
