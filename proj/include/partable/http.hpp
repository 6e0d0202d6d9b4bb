#pragma once

#include <memory>
#include <string>

#include "partable/service.hpp"

namespace partable {

inline constexpr int default_port = 7341;

/// POST /session, GET /session/{id}, POST /session/{id}/act, DELETE /session/{id}.
class HttpServer {
public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds a free port and returns it; run() then serves on it.
  int bind_any(const std::string& host);
  bool run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace partable
