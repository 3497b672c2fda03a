#pragma once

#include <memory>
#include <string>

#include "fcc/service/compliance_service.hpp"

namespace fcc::service {

/// JSON-over-HTTP front end for a ComplianceService, rooted at /api/v1.
/// The analyst id for decisions comes from the X-Analyst-Id header when the
/// body does not carry one; X-Request-Id supplies the idempotency key.
class HttpServer {
 public:
  explicit HttpServer(ComplianceService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port`; port 0 picks a free one. Returns the bound port or
  /// throws Error(IoError).
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void listen();
  void stop();
  void wait_until_ready() const;
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fcc::service
