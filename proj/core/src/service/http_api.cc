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

#include "cmaesig/service/http_api.h"

#include <atomic>
#include <exception>

#include <httplib.h>

#include "cmaesig/service/errors.h"

namespace cmaesig::service {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ServiceError(ErrorCode::kMalformedJson, e.what());
  }
}

// Runs `fn` and maps exceptions onto the JSON error envelope.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ServiceError& e) {
      send_error(res, http_status(e.code()), error_code_name(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, error_code_name(ErrorCode::kInvalidArgument), e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, error_code_name(ErrorCode::kInvalidArgument), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, error_code_name(ErrorCode::kInternal), e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  SessionManager& manager;
  httplib::Server server;
  std::atomic<int> port{-1};

  explicit Impl(SessionManager& m) : manager(m) { routes(); }

  void routes() {
    server.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, 200, {{"status", "ok"}, {"sessions", manager.size()}});
               }));
    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = manager.create(parse_body(req));
                  send_json(res, 201, manager.summary(id));
                }));
    server.Get(R"(/sessions/([^/]+)/query)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, manager.query(req.matches[1]));
               }));
    server.Post(R"(/sessions/([^/]+)/ranking)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  send_json(res, 200, manager.submit_ranking(req.matches[1], parse_body(req)));
                }));
    server.Get(R"(/sessions/([^/]+)/best)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, manager.predicted_best(req.matches[1]));
               }));
    server.Put(R"(/sessions/([^/]+)/favorite)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, manager.set_favorite(req.matches[1], parse_body(req)));
               }));
    server.Get(R"(/sessions/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, manager.summary(req.matches[1]));
               }));
    // Unmatched routes and methods: keep the JSON envelope.
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      send_error(res, res.status, res.status == 404 ? "NOT_FOUND" : "HTTP_ERROR",
                 httplib::status_message(res.status));
    });
  }
};

HttpServer::HttpServer(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {}
HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p <= 0) return false;
    impl_->port = p;
    return true;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

int HttpServer::port() const { return impl_->port; }
void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}
bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace cmaesig::service
