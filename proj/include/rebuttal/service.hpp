#pragma once

// HTTP+JSON service over the pipeline. Long operations (tsr, candidates,
// judge) answer 202 with a run id and run on a bounded worker pool; their
// stage events are readable from GET /api/runs/{id} and streamed as
// server-sent events from GET /api/runs/{id}/events.

#include <memory>
#include <string>

#include "rebuttal/app_config.hpp"
#include "rebuttal/json_util.hpp"

namespace rebuttal {

struct HttpReply {
  int status = 200;
  json body;
};

class Service {
 public:
  /// Gateways come from make_gateway(config.provider / judge_provider()).
  explicit Service(AppConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port;
  /// the bound port is returned.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

  /// Dispatches one request without a socket; what the HTTP handlers call.
  HttpReply handle(const std::string& method, const std::string& path, const std::string& body);

  /// Blocks until no run is queued or executing.
  void wait_idle();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rebuttal
