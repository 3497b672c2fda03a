#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include <httplib.h>

#include "fcc/service/http_server.hpp"
#include "properties.hpp"

using namespace fcc;
using namespace fcc::service;
using nlohmann::json;

namespace {

std::string file_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class LiveServer : public ::testing::Test {
 protected:
  void SetUp() override {
    svc_ = std::make_unique<ComplianceService>(ServiceConfig::from_json(
        {{"data_dir", (dir_.path / "data").string()},
         {"wallet_registry", (props::golden_dir() / "registry.jsonl").string()},
         {"dev_mode", true}},
        props::golden_dir()));
    server_ = std::make_unique<HttpServer>(*svc_);
    const int port = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  httplib::Result post(const std::string& path, const json& body, const httplib::Headers& headers = {}) {
    return client_->Post(path, headers, body.dump(), "application/json");
  }
  json get_json(const std::string& path, int want = 200) {
    auto r = client_->Get(path);
    EXPECT_TRUE(r);
    if (!r) return {};
    EXPECT_EQ(r->status, want) << path << " " << r->body;
    return json::parse(r->body);
  }
  void ingest_golden() {
    auto r = client_->Post("/api/v1/transactions:batch", {{"X-Request-Id", "golden"}},
                           file_text(props::golden_dir() / "stream.jsonl"), "application/x-ndjson");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 202) << r->body;
  }

  props::TempDir dir_{"http"};
  std::unique_ptr<ComplianceService> svc_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_F(LiveServer, BatchAcceptedAndChainVerifies) {
  ingest_golden();
  const json v = get_json("/api/v1/audit/verify");
  EXPECT_TRUE(v["ok"].get<bool>());
  EXPECT_GT(v["records"].get<int>(), 8);
  EXPECT_EQ(get_json("/api/v1/alerts?type=WASH_TRADING")["alerts"].size(), 2u);
  EXPECT_EQ(get_json("/api/v1/metrics")["alerts"], 5);
}

TEST_F(LiveServer, JsonBatchBody) {
  json events = json::array();
  for (const auto& e : props::read_stream(props::golden_dir() / "stream.jsonl")) {
    events.push_back(json::parse(ingest::serialize_trade_event(e)));
  }
  auto r = post("/api/v1/transactions:batch", {{"events", events}, {"request_id", "b-json"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 202);
  EXPECT_EQ(json::parse(r->body)["request_id"], "b-json");
}

TEST_F(LiveServer, MalformedBatchIs400) {
  auto r = post("/api/v1/transactions:batch", {{"events", json::array({{{"collection_id", "c"}}})}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["code"], "MissingField");
}

TEST_F(LiveServer, EscalationDecisionAndReport) {
  ingest_golden();
  const json esc = get_json("/api/v1/escalations")["escalations"];
  ASSERT_EQ(esc.size(), 1u);
  EXPECT_EQ(esc[0]["risk_score"], 70);
  const std::string id = esc[0]["escalation_id"];

  auto text = client_->Get("/api/v1/reports/STR-000001?format=text");
  ASSERT_TRUE(text);
  EXPECT_EQ(text->status, 200);
  EXPECT_NE(text->body.find("moderate to high (70)"), std::string::npos);

  const httplib::Headers h{{"X-Analyst-Id", "analyst-9"}, {"X-Request-Id", "dec-1"}};
  auto first = post("/api/v1/escalations/" + id + "/decision", {{"decision", "confirm"}, {"rationale", "ok"}}, h);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->status, 200) << first->body;
  EXPECT_EQ(json::parse(first->body)["state"], "SUBMITTED");

  // Double submit: same request id replays, a new one conflicts; one decision either way.
  auto replay = post("/api/v1/escalations/" + id + "/decision", {{"decision", "confirm"}, {"rationale", "ok"}}, h);
  EXPECT_EQ(replay->status, 200);
  auto again = post("/api/v1/escalations/" + id + "/decision",
                    {{"decision", "confirm"}, {"rationale", "ok"}, {"analyst", "analyst-9"}});
  EXPECT_EQ(again->status, 409);
  EXPECT_EQ(get_json("/api/v1/audit?action=DECIDE_CASE")["records"].size(), 1u);
  EXPECT_EQ(get_json("/api/v1/metrics")["feedback"]["total"], 1);
  EXPECT_TRUE(std::filesystem::exists(dir_.path / "data" / "outbox" / "STR-000001.json"));
  EXPECT_TRUE(get_json("/api/v1/escalations")["escalations"].empty());
}

TEST_F(LiveServer, NotFoundShapes) {
  auto r = post("/api/v1/escalations/HO-999/decision", {{"decision", "confirm"}, {"rationale", "x"}, {"analyst", "a"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(json::parse(r->body)["code"], "UnknownEscalation");
  EXPECT_EQ(get_json("/api/v1/reports/STR-404", 404)["code"], "NotFound");
  EXPECT_EQ(get_json("/api/v1/cases/CASE-404", 404)["code"], "UnknownCase");
  EXPECT_EQ(get_json("/api/v1/nope", 404)["code"], "NotFound");
}

TEST_F(LiveServer, CostReportAndModels) {
  const json c = get_json("/api/v1/cost-report?U=100000&R=100&s=0.045&h=1.98");
  EXPECT_EQ(c["manual_hours"], "891000");
  EXPECT_EQ(get_json("/api/v1/cost-report?U=abc", 400)["code"], "InvalidParams");
  EXPECT_FALSE(get_json("/api/v1/models")["profiles"].empty());
  EXPECT_EQ(get_json("/api/v1/optimizer")["theta"], 50);
}

TEST_F(LiveServer, FeedbackAndCalibrate) {
  ingest_golden();
  const std::string case_id = get_json("/api/v1/cases")["cases"][0]["case_id"];
  auto fb = post("/api/v1/cases/" + case_id + "/feedback", {{"label", "FALSE_POSITIVE"}});
  ASSERT_TRUE(fb);
  EXPECT_EQ(fb->status, 200) << fb->body;
  auto dup = post("/api/v1/cases/" + case_id + "/feedback", {{"label", "FALSE_POSITIVE"}});
  EXPECT_EQ(dup->status, 409);
  auto cal = post("/api/v1/optimizer:calibrate", json::object());
  ASSERT_TRUE(cal);
  EXPECT_EQ(cal->status, 200);
  EXPECT_EQ(json::parse(cal->body)["theta_after"], 75);
}
