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

// HTTP binding of the session manager.
//
//   GET  /health                     {"status":"ok","sessions":n}
//   POST /sessions                   SessionConfig fields -> {"session_id":...}
//   GET  /sessions/{id}/query        pending query (generated on demand)
//   POST /sessions/{id}/ranking      {"order":[...], "query_id":n?}
//   GET  /sessions/{id}/best         predicted best pool item
//   PUT  /sessions/{id}/favorite     {"item_id":...}
//   GET  /sessions/{id}              state summary
//
// "order" is best first and holds either query positions (integers) or item
// ids (strings). Errors answer {"error":{"code":...,"message":...}} with a
// 4xx/5xx status.

#ifndef CMAESIG_SERVICE_HTTP_API_H_
#define CMAESIG_SERVICE_HTTP_API_H_

#include <memory>
#include <string>

#include "cmaesig/service/session_manager.h"

namespace cmaesig::service {

class HttpServer {
 public:
  explicit HttpServer(SessionManager& manager);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds host:port (port 0 picks a free port). Returns false on failure.
  bool bind(const std::string& host, int port);
  int port() const;
  // Serves until stop() is called. Requires a successful bind().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cmaesig::service

#endif  // CMAESIG_SERVICE_HTTP_API_H_
