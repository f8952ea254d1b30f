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

#include "cmaesig/service/event_log.h"

#include <chrono>
#include <ctime>
#include <iterator>

#include "cmaesig/service/errors.h"

namespace cmaesig::service {

namespace {

[[noreturn]] void corrupt(const std::filesystem::path& path, std::size_t line,
                          const std::string& what) {
  throw ServiceError(ErrorCode::kCorruptLog,
                     path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string_view event_type_name(EventType type) {
  switch (type) {
    case EventType::kCreate:
      return "create";
    case EventType::kQuery:
      return "query";
    case EventType::kRanking:
      return "ranking";
    case EventType::kFavorite:
      return "favorite";
  }
  return "?";
}

EventType parse_event_type(std::string_view name) {
  if (name == "create") return EventType::kCreate;
  if (name == "query") return EventType::kQuery;
  if (name == "ranking") return EventType::kRanking;
  if (name == "favorite") return EventType::kFavorite;
  throw ServiceError(ErrorCode::kCorruptLog, "unknown event type '" + std::string(name) + "'");
}

nlohmann::json Event::to_json() const {
  nlohmann::json j = {{"seq", seq}, {"type", event_type_name(type)}, {"time", time}};
  if (seed) j["seed"] = *seed;
  j["payload"] = payload;
  return j;
}

Event Event::from_json(const nlohmann::json& j) {
  try {
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.type = parse_event_type(j.at("type").get<std::string>());
    e.time = j.at("time").get<std::string>();
    if (auto it = j.find("seed"); it != j.end()) e.seed = it->get<std::uint64_t>();
    e.payload = j.at("payload");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ServiceError(ErrorCode::kCorruptLog, std::string("malformed event: ") + ex.what());
  }
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t secs = system_clock::to_time_t(now);
  const auto millis = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%.*s.%03dZ", static_cast<int>(n), buf, static_cast<int>(millis));
  return out;
}

SessionLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ServiceError(ErrorCode::kCorruptLog, "cannot open session log " + path.string());
  }
  SessionLog log;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const bool complete = !in.eof();  // getline hit a newline
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      if (!complete) break;  // torn tail from an interrupted append
      corrupt(path, lineno, "invalid JSON");
    }
    if (!header) {
      if (!j.is_object() || j.value("format", "") != kLogFormat) {
        corrupt(path, lineno, "missing log header");
      }
      if (j.value("version", 0) != kLogVersion) {
        corrupt(path, lineno, "unsupported log version " + j.value("version", nlohmann::json()).dump());
      }
      log.session_id = j.value("session_id", "");
      if (log.session_id.empty()) corrupt(path, lineno, "header lacks session_id");
      header = true;
      continue;
    }
    Event e;
    try {
      e = Event::from_json(j);
    } catch (const ServiceError& ex) {
      corrupt(path, lineno, ex.what());
    }
    if (e.seq != log.events.size()) {
      corrupt(path, lineno,
              "expected seq " + std::to_string(log.events.size()) + ", found " +
                  std::to_string(e.seq));
    }
    log.events.push_back(std::move(e));
  }
  if (!header) corrupt(path, lineno, "empty session log");
  return log;
}

LogWriter::LogWriter(std::filesystem::path path, std::ofstream out)
    : path_(std::move(path)), out_(std::move(out)) {}

LogWriter LogWriter::create(const std::filesystem::path& path, const std::string& session_id) {
  if (std::filesystem::exists(path)) {
    throw ServiceError(ErrorCode::kInternal, "session log already exists: " + path.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::out);
  if (!out) throw ServiceError(ErrorCode::kInternal, "cannot create " + path.string());
  LogWriter w(path, std::move(out));
  const nlohmann::json header = {
      {"format", kLogFormat}, {"version", kLogVersion}, {"session_id", session_id}};
  w.out_ << header.dump() << '\n';
  w.out_.flush();
  if (!w.out_) throw ServiceError(ErrorCode::kInternal, "cannot write " + path.string());
  return w;
}

LogWriter LogWriter::append_to(const std::filesystem::path& path) {
  // Drop a torn final record so the next append starts on a fresh line.
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ServiceError(ErrorCode::kInternal, "cannot open " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!text.empty() && text.back() != '\n') {
      const auto keep = text.find_last_of('\n');
      std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ServiceError(ErrorCode::kInternal, "cannot open " + path.string());
  return LogWriter(path, std::move(out));
}

void LogWriter::append(const Event& event) {
  out_ << event.to_json().dump() << '\n';
  out_.flush();
  if (!out_) throw ServiceError(ErrorCode::kInternal, "cannot append to " + path_.string());
}

}  // namespace cmaesig::service
