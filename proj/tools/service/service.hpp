#pragma once

#include <memory>
#include <optional>
#include <string>

#include "bnet/bnet.h"

namespace bnet::service {

struct Reply {
  int status = 200;
  std::string body;
};

// Read-only query service over one loaded network. All handlers are safe to
// call concurrently.
class QueryService {
 public:
  // Throws std::runtime_error carrying the C API status when loading fails.
  QueryService(const std::string& model_path, const std::optional<std::string>& ensemble_path);
  ~QueryService();
  QueryService(const QueryService&) = delete;
  QueryService& operator=(const QueryService&) = delete;

  const std::string& fingerprint() const noexcept { return fingerprint_; }

  Reply variables() const;
  Reply graph() const;
  Reply health() const;
  Reply query(const std::string& body) const;
  Reply whatif(const std::string& body) const;
  // Dispatches by method and path; unknown routes give 404.
  Reply handle(const std::string& method, const std::string& path, const std::string& body) const;

 private:
  Reply error_reply(bnet_status status, const std::string& endpoint) const;
  Reply wrap(bnet_status status, char* json, const std::string& endpoint, const char* key) const;

  bnet_network* net_ = nullptr;
  bnet_ensemble* ensemble_ = nullptr;
  std::string fingerprint_;
};

// HTTP status for a failed C API call: 422 for contradictory evidence, 500
// for internal faults, 400 otherwise.
int http_status_for(bnet_status status);

class HttpServer {
 public:
  explicit HttpServer(const QueryService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bnet::service
