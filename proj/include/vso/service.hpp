#pragma once

// Session API over the composition loop. `Service` is transport-free: it
// maps (method, path, query, JSON body) to (status, JSON body) so it can be
// driven directly or through HttpServer.
//
// Every mutating call carries the revision the client last saw; the call
// succeeds only if it still matches, runs against a copy of the
// environment, and commits (bumping the revision) only on success.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vso/codegen.hpp"
#include "vso/composer.hpp"
#include "vso/error.hpp"
#include "vso/model.hpp"

namespace httplib {
class Server;
}

namespace vso::api {

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// HTTP status for a core error code: 404 unknown ids, 409 stale revision
/// or occupied input, 400 malformed request bodies, 422 everything else.
int http_status(ErrorCode code);

class Service {
 public:
  Service(Catalog catalog, std::map<std::string, DslVocabulary> vocabularies = {});

  Response handle(std::string_view method, std::string_view path,
                  const std::map<std::string, std::string>& query, std::string_view body);

  const Catalog& catalog() const noexcept { return catalog_; }
  const std::string& catalog_version() const noexcept { return catalog_version_; }

 private:
  struct Session {
    std::string id;
    Environment env;
    std::uint64_t revision = 1;
    std::mutex mutex;
  };

  std::shared_ptr<Session> find_session(const std::string& id) const;
  const DslVocabulary& vocabulary(const std::string& name) const;

  Response route(std::string_view method, const std::vector<std::string>& segments,
                 const std::map<std::string, std::string>& query, const nlohmann::json& body);
  Response session_route(std::string_view method, Session& session,
                         const std::vector<std::string>& rest,
                         const std::map<std::string, std::string>& query,
                         const nlohmann::json& body);

  template <class Fn>
  Response mutate(Session& session, const nlohmann::json& body, Fn&& fn);

  const Catalog catalog_;
  const std::string catalog_version_;
  std::map<std::string, DslVocabulary> vocabularies_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// cpp-httplib front end forwarding every /v1/ request to a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port`; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace vso::api
