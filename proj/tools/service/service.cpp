#include "service.hpp"

#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace bnet::service {

namespace {

using Json = nlohmann::ordered_json;

std::string take(char* s) {
  std::string out = s ? s : "";
  bnet_string_free(s);
  return out;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

[[noreturn]] void throw_status(bnet_status status, const std::string& what) {
  throw std::runtime_error(what + ": " + bnet_status_name(status) + ": " + bnet_last_error());
}

}  // namespace

int http_status_for(bnet_status status) {
  switch (status) {
    case BNET_OK: return 200;
    case BNET_ERR_IMPOSSIBLE_EVIDENCE: return 422;
    case BNET_ERR_INTERNAL: return 500;
    default: return 400;
  }
}

QueryService::QueryService(const std::string& model_path, const std::optional<std::string>& ensemble_path) {
  if (bnet_status s = bnet_network_read(model_path.c_str(), &net_); s != BNET_OK) {
    throw_status(s, "loading model '" + model_path + "'");
  }
  if (ensemble_path) {
    if (bnet_status s = bnet_ensemble_read(ensemble_path->c_str(), net_, &ensemble_); s != BNET_OK) {
      bnet_network_free(net_);
      throw_status(s, "loading ensemble '" + *ensemble_path + "'");
    }
  }
  fingerprint_ = bnet_network_fingerprint(net_);
}

QueryService::~QueryService() {
  bnet_ensemble_free(ensemble_);
  bnet_network_free(net_);
}

Reply QueryService::error_reply(bnet_status status, const std::string& endpoint) const {
  Json body{{"code", bnet_status_name(status)},
            {"message", bnet_last_error()},
            {"detail", {{"status", static_cast<int>(status)}, {"endpoint", endpoint}}},
            {"fingerprint", fingerprint_}};
  return {http_status_for(status), dump(body)};
}

// Attaches the fingerprint to list/graph payloads; `key` names the field
// that holds a bare array.
Reply QueryService::wrap(bnet_status status, char* json, const std::string& endpoint, const char* key) const {
  if (status != BNET_OK) return error_reply(status, endpoint);
  Json doc = Json::parse(take(json));
  if (key != nullptr) doc = Json{{key, std::move(doc)}};
  doc["fingerprint"] = fingerprint_;
  return {200, dump(doc)};
}

Reply QueryService::variables() const {
  char* out = nullptr;
  const bnet_status s = bnet_network_variables(net_, &out);
  return wrap(s, out, "/variables", "variables");
}

Reply QueryService::graph() const {
  char* out = nullptr;
  const bnet_status s = bnet_network_graph(net_, ensemble_, &out);
  return wrap(s, out, "/graph", nullptr);
}

Reply QueryService::health() const {
  return {200, dump(Json{{"status", "ok"}, {"fingerprint", fingerprint_}})};
}

// The C API already embeds the fingerprint, so the body is passed through
// unchanged; this keeps it identical to `bnet query` output.
Reply QueryService::query(const std::string& body) const {
  char* out = nullptr;
  if (bnet_status s = bnet_query(net_, body.c_str(), &out); s != BNET_OK) return error_reply(s, "/query");
  return {200, take(out)};
}

Reply QueryService::whatif(const std::string& body) const {
  char* out = nullptr;
  if (bnet_status s = bnet_whatif(net_, body.c_str(), &out); s != BNET_OK) return error_reply(s, "/whatif");
  return {200, take(out)};
}

Reply QueryService::handle(const std::string& method, const std::string& path, const std::string& body) const {
  if (method == "GET" && path == "/variables") return variables();
  if (method == "GET" && path == "/graph") return graph();
  if (method == "GET" && path == "/healthz") return health();
  if (method == "POST" && path == "/query") return query(body);
  if (method == "POST" && path == "/whatif") return whatif(body);
  Json err{{"code", "NotFound"},
           {"message", "no route for " + method + " " + path},
           {"detail", {{"endpoint", path}}},
           {"fingerprint", fingerprint_}};
  return {404, dump(err)};
}

struct HttpServer::Impl {
  const QueryService& service;
  httplib::Server server;
};

HttpServer::HttpServer(const QueryService& service) : impl_(new Impl{service, {}}) {
  auto& svc = impl_->service;
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json; charset=utf-8");
  };
  impl_->server.Get("/variables", [&svc, send](const httplib::Request&, httplib::Response& res) {
    send(res, svc.variables());
  });
  impl_->server.Get("/graph", [&svc, send](const httplib::Request&, httplib::Response& res) {
    send(res, svc.graph());
  });
  impl_->server.Get("/healthz", [&svc, send](const httplib::Request&, httplib::Response& res) {
    send(res, svc.health());
  });
  impl_->server.Post("/query", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.query(req.body));
  });
  impl_->server.Post("/whatif", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.whatif(req.body));
  });
  impl_->server.set_error_handler([&svc, send](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404) send(res, svc.handle(req.method, req.path, req.body));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace bnet::service
