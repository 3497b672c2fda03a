#include "fcc/service/http_server.hpp"

#include <httplib.h>

#include <sstream>

namespace fcc::service {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

std::string request_id(const httplib::Request& req, const json& body) {
  if (req.has_header("X-Request-Id")) return req.get_header_value("X-Request-Id");
  if (body.is_object() && body.contains("request_id") && body["request_id"].is_string()) {
    return body["request_id"].get<std::string>();
  }
  return "";
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::MalformedValue, "body must be a JSON object");
    return j;
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::MalformedValue, "body is not valid JSON");
  }
}

std::string text_field(const json& body, const char* key) {
  if (!body.contains(key)) return "";
  if (!body[key].is_string()) throw Error(ErrorCode::MalformedValue, key);
  return body[key].get<std::string>();
}

std::vector<ingest::TradeEvent> batch_events(const httplib::Request& req) {
  std::vector<ingest::TradeEvent> events;
  const std::string type = req.get_header_value("Content-Type");
  if (type.rfind("application/x-ndjson", 0) == 0) {
    std::istringstream in(req.body);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) events.push_back(ingest::parse_trade_event(line));
    }
    return events;
  }
  const json body = parse_body(req);
  if (!body.contains("events") || !body["events"].is_array()) throw Error(ErrorCode::MissingField, "events");
  for (const auto& e : body["events"]) events.push_back(ingest::parse_trade_event(e.dump()));
  return events;
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

template <typename Fn>
httplib::Server::Handler wrap(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send(res, http_status(e.code()), error_body(e));
    } catch (const std::exception& e) {
      send(res, 500, {{"code", "Internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  ComplianceService& service;
  httplib::Server server;
  int port = 0;

  explicit Impl(ComplianceService& s) : service(s) { routes(); }

  void routes() {
    auto& svc = service;
    server.Post("/api/v1/transactions:batch", wrap([&svc](const auto& req, auto& res) {
      const auto events = batch_events(req);
      const bool ndjson = req.get_header_value("Content-Type").rfind("application/x-ndjson", 0) == 0;
      json body = ndjson || req.body.empty() ? json::object() : parse_body(req);
      send(res, 202, svc.ingest(events, request_id(req, body)));
    }));
    server.Post("/api/v1/generate", wrap([&svc](const auto& req, auto& res) {
      const json body = parse_body(req);
      const json cfg = body.contains("config") ? body["config"] : json::object();
      send(res, 202, svc.generate(ingest::GeneratorConfig::from_json(cfg), request_id(req, body)));
    }));
    server.Get("/api/v1/alerts", wrap([&svc](const auto& req, auto& res) {
      send(res, 200, {{"alerts", svc.alerts(query(req, "wallet"), query(req, "type"))}});
    }));
    server.Get("/api/v1/cases", wrap([&svc](const auto& req, auto& res) {
      send(res, 200, {{"cases", svc.cases(query(req, "state"))}});
    }));
    server.Get(R"(/api/v1/cases/([^/]+))", wrap([&svc](const auto& req, auto& res) {
      send(res, 200, svc.case_detail(req.matches[1]));
    }));
    server.Get("/api/v1/escalations", wrap([&svc](const auto&, auto& res) {
      send(res, 200, {{"escalations", svc.escalations()}});
    }));
    server.Post(R"(/api/v1/escalations/([^/]+)/decision)", wrap([&svc](const auto& req, auto& res) {
      const json body = parse_body(req);
      std::string analyst = text_field(body, "analyst");
      if (analyst.empty() && req.has_header("X-Analyst-Id")) analyst = req.get_header_value("X-Analyst-Id");
      send(res, 200, svc.decide(req.matches[1], text_field(body, "decision"), text_field(body, "rationale"), analyst,
                                request_id(req, body)));
    }));
    server.Get(R"(/api/v1/reports/([^/]+))", wrap([&svc](const auto& req, auto& res) {
      const std::string format = query(req, "format").value_or("json");
      if (format == "text") {
        res.status = 200;
        res.set_content(svc.report_text(req.matches[1]), "text/plain; charset=utf-8");
      } else if (format == "json") {
        send(res, 200, svc.report_json(req.matches[1]));
      } else {
        throw Error(ErrorCode::MalformedValue, "format");
      }
    }));
    server.Get("/api/v1/audit/verify", wrap([&svc](const auto&, auto& res) { send(res, 200, svc.audit_verify()); }));
    server.Get("/api/v1/audit", wrap([&svc](const auto& req, auto& res) {
      audit::AuditFilter filter;
      filter.case_id = query(req, "case_id");
      filter.action = query(req, "action");
      if (auto agent = query(req, "agent")) {
        filter.agent = parse_agent_id(*agent);
        if (!filter.agent) throw Error(ErrorCode::MalformedValue, "agent");
      }
      send(res, 200, {{"records", svc.audit(filter)}});
    }));
    server.Get("/api/v1/metrics", wrap([&svc](const auto&, auto& res) { send(res, 200, svc.metrics()); }));
    server.Get("/api/v1/cost-report", wrap([&svc](const auto& req, auto& res) {
      std::map<std::string, std::string> params;
      for (const auto& [key, value] : req.params) params[key] = value;
      send(res, 200, svc.cost_report(params));
    }));
    server.Get("/api/v1/models", wrap([&svc](const auto&, auto& res) { send(res, 200, svc.models()); }));
    server.Post(R"(/api/v1/models/([^/]+)/score)", wrap([&svc](const auto& req, auto& res) {
      const json body = parse_body(req);
      if (!body.contains("pass") || !body["pass"].is_boolean()) throw Error(ErrorCode::MissingField, "pass");
      send(res, 200, svc.score_model(req.matches[1], body["pass"].get<bool>(), request_id(req, body)));
    }));
    server.Get("/api/v1/optimizer", wrap([&svc](const auto&, auto& res) { send(res, 200, svc.optimizer()); }));
    server.Post("/api/v1/optimizer:calibrate", wrap([&svc](const auto& req, auto& res) {
      const json body = parse_body(req);
      send(res, 200, svc.calibrate(request_id(req, body)));
    }));
    server.Post(R"(/api/v1/cases/([^/]+)/feedback)", wrap([&svc](const auto& req, auto& res) {
      const json body = parse_body(req);
      auto label = investigate::parse_analyst_label(text_field(body, "label"));
      if (!label) throw Error(ErrorCode::MalformedValue, "label");
      send(res, 200, svc.record_feedback(req.matches[1], *label, request_id(req, body)));
    }));
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send(res, res.status, {{"code", res.status == 404 ? "NotFound" : "HttpError"}, {"message", "no such route"}});
      }
    });
  }
};

HttpServer::HttpServer(ComplianceService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }
int HttpServer::port() const { return impl_->port; }

}  // namespace fcc::service
