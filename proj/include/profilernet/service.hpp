#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "profilernet/dataset.hpp"
#include "profilernet/inference.hpp"
#include "profilernet/network.hpp"

namespace profilernet::service {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Request handlers for one immutable model. Bodies are JSON objects:
///
///   request               {"evidence": {"<id>": "<state label>" | <1-based index>}}
///   POST /infer  -> 200   {"evidence": {...}, "posteriors": {"<id>": [p, ...]}}
///   POST /predict -> 200  {"evidence": {...}, "predictions":
///                          [{"variable": id, "state": label, "confidence": p}]}
///   errors       -> 400   {"error": {"code": ..., "message": ...}}
///
/// Error codes: unknown_variable, bad_state, impossible_evidence, and
/// bad_request for anything else wrong with the request.
class Service {
 public:
  explicit Service(Network net);

  ApiResponse health() const;
  ApiResponse network() const;
  ApiResponse infer(std::string_view body) const;
  ApiResponse predict(std::string_view body) const;

  const Network& model() const { return engine_.network(); }

 private:
  VariableElimination engine_;
};

/// The /infer response body for `ev`: posteriors of every non-evidenced
/// variable. Shared with `profilernet infer --json`.
std::string infer_json(const VariableElimination& engine, const Evidence& ev);

/// cpp-httplib server exposing a Service. The service must outlive it.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
  /// Throws Error when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Requires a successful bind().
  void listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace profilernet::service
