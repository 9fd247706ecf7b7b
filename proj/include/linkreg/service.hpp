#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "linkreg/serialize.hpp"
#include "linkreg/store.hpp"

namespace linkreg {

struct ServiceConfig {
  std::filesystem::path store_dir = "store";
  std::size_t upload_limit_bytes = 32u << 20;
  std::string cors_origin;                  // empty disables CORS headers
  std::optional<std::filesystem::path> ui_dir;  // static files served under /
  std::string id_seed;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

/// Transport-independent API. Each method maps one endpoint; errors are
/// returned as {"errors": [{"code", "message", ...}]} with an HTTP status.
class Service {
 public:
  explicit Service(ServiceConfig config);

  const ServiceConfig& config() const { return config_; }
  Store& store() { return store_; }

  ApiResponse health() const;
  /// POST /api/datasets. `files` holds every uploaded file keyed by name.
  ApiResponse create_dataset(const std::string& manifest_text, const std::map<std::string, std::string>& files);
  ApiResponse get_dataset(const std::string& id);
  ApiResponse geometry(const std::string& id);
  ApiResponse extract_features(const std::string& id, const std::string& body);
  ApiResponse create_model(const std::string& body);
  ApiResponse get_model(const std::string& id);
  ApiResponse predict(const std::string& model_id, const std::string& body);

 private:
  ServiceConfig config_;
  Store store_;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);
Json error_body(ErrorCode code, const std::string& message);

/// cpp-httplib binding of Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool run();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace linkreg
