#include <gtest/gtest.h>

#include <fstream>

#include "fcc/common/error.hpp"
#include "fcc/service/compliance_service.hpp"
#include "properties.hpp"

using namespace fcc;
using namespace fcc::service;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

ServiceConfig golden_config(const std::filesystem::path& data_dir, bool dev_mode = true) {
  return ServiceConfig::from_json({{"data_dir", data_dir.string()},
                                   {"wallet_registry", (props::golden_dir() / "registry.jsonl").string()},
                                   {"dev_mode", dev_mode}},
                                  props::golden_dir());
}

std::vector<ingest::TradeEvent> golden_events() { return props::read_stream(props::golden_dir() / "stream.jsonl"); }

std::string file_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

// ---- cost model -----------------------------------------------------------

TEST(CostModel, AnchorValues) {
  CostModelParams p;
  p.users = 100'000;
  p.tx_per_user = 100;
  p.suspicion_rate = parse_rational("0.045", "s");
  const auto r = compute_cost_report(p);
  EXPECT_EQ(r.alerts_per_year, Rational(450'000));
  EXPECT_EQ(r.manual_hours, Rational(900'000));
  EXPECT_EQ(r.manual_fte, Rational(480));
  const auto o = oracle::cost(100'000, 100, Rational(45, 1000), 2, 1875, Rational(222, 100), Rational(1, 1666), 60);
  EXPECT_EQ(r.inference_cost_usd, o.inference);
  EXPECT_EQ(r.reduction_fraction, o.reduction);
  EXPECT_GT(r.reduction_fraction, Rational(98, 100));

  p.manual_hours_per_alert = parse_rational("1.98", "h");
  EXPECT_EQ(compute_cost_report(p).manual_hours, Rational(891'000));

  p.api_calls_per_alert = 1;
  const auto one_call = compute_cost_report(p);
  EXPECT_EQ(one_call.inference_cost_usd, Rational(450'000, 1666));
  EXPECT_EQ(format_rational(one_call.inference_cost_usd, 2), "270.11");
}

TEST(CostModel, ZeroRateAndSlowAutomation) {
  CostModelParams p;
  p.users = 10;
  p.tx_per_user = 10;
  const auto r = compute_cost_report(p);
  EXPECT_EQ(r.alerts_per_year, 0);
  EXPECT_EQ(r.manual_fte, 0);
  p.automated_seconds_per_case = 10'000;
  EXPECT_EQ(compute_cost_report(p).reduction_fraction, 0);
}

TEST(CostModel, ParsingAndValidation) {
  EXPECT_EQ(parse_rational("1/1666", "p"), Rational(1, 1666));
  EXPECT_EQ(parse_rational("12", "U"), Rational(12));
  EXPECT_EQ(code_of([] { parse_rational("abc", "U"); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { parse_rational("1/0", "p"); }), ErrorCode::InvalidParams);
  CostModelParams p;
  p.suspicion_rate = 2;
  EXPECT_EQ(code_of([&] { compute_cost_report(p); }), ErrorCode::InvalidParams);
  const auto q = CostModelParams::from_strings({{"U", "5"}, {"h", "1.98"}}, CostModelParams{});
  EXPECT_EQ(q.users, 5);
  EXPECT_EQ(q.manual_hours_per_alert, Rational(198, 100));
  EXPECT_EQ(q.fte_hours_per_year, 1875);
}

// ---- configuration --------------------------------------------------------

TEST(Config, RelativePathsAndOverrides) {
  const auto cfg = ServiceConfig::from_json(
      {{"data_dir", "d"}, {"port", 9000}, {"ruleset", {{"velocity_max_trades_24h", 5}}}, {"optimizer", {{"theta", 40}}}},
      "/srv/base");
  EXPECT_EQ(cfg.data_dir, std::filesystem::path("/srv/base/d"));
  EXPECT_EQ(cfg.port, 9000);
  EXPECT_EQ(cfg.engine.ruleset.velocity_max_trades_24h, 5);
  EXPECT_EQ(cfg.engine.optimizer.theta, 40);
}

TEST(Config, BadValuesRejected) {
  EXPECT_EQ(code_of([] { ServiceConfig::from_json({{"port", "eighty"}}, "."); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { ServiceConfig::from_json({{"optimizer", {{"grid_step", 7}}}}, "."); }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { ServiceConfig::from_json({{"sanctions_list", "/nonexistent/list.txt"}}, "."); }),
            ErrorCode::InvalidConfig);
}

TEST(Config, ResolveFromFlag) {
  EXPECT_EQ(resolve_config_path(std::string("x.json")), std::filesystem::path("x.json"));
}

// ---- service --------------------------------------------------------------

TEST(Service, GoldenEscalationAndConfirm) {
  props::TempDir dir("svc");
  ComplianceService svc(golden_config(dir.path / "data"));
  const json summary = svc.ingest(golden_events(), "batch-1");
  EXPECT_EQ(summary["accepted"], 24);
  EXPECT_EQ(summary["alerts"], 5);

  const json esc = svc.escalations();
  ASSERT_EQ(esc.size(), 1u);
  EXPECT_EQ(esc[0]["risk_score"], 70);
  EXPECT_EQ(esc[0]["band"], "MODERATE_HIGH");
  EXPECT_EQ(esc[0]["report_id"], "STR-000001");

  const json done = svc.decide(esc[0]["escalation_id"], "confirm", "consistent with wash trading", "analyst-1", "d-1");
  EXPECT_EQ(done["state"], "SUBMITTED");
  EXPECT_TRUE(std::filesystem::exists(svc.outbox_dir() / "STR-000001.json"));
  EXPECT_NE(file_text(svc.outbox_dir() / "STR-000001.txt").find("moderate to high (70)"), std::string::npos);
  EXPECT_TRUE(svc.escalations().empty());
  EXPECT_EQ(svc.metrics()["feedback"]["total"], 1);
  EXPECT_TRUE(svc.audit_verify()["ok"].get<bool>());

  EXPECT_EQ(code_of([&] { svc.decide(esc[0]["escalation_id"], "dismiss", "late", "analyst-2", "d-2"); }),
            ErrorCode::NotPending);
}

TEST(Service, DismissLeavesOutboxEmpty) {
  props::TempDir dir("svc");
  ComplianceService svc(golden_config(dir.path / "data"));
  svc.ingest(golden_events(), "batch-1");
  const json esc = svc.escalations();
  EXPECT_EQ(svc.decide(esc[0]["escalation_id"], "dismiss", "known desk", "analyst-1", "")["state"], "REJECTED");
  EXPECT_FALSE(std::filesystem::exists(svc.outbox_dir() / "STR-000001.json"));
}

TEST(Service, RequestIdsAreIdempotent) {
  props::TempDir dir("svc");
  ComplianceService svc(golden_config(dir.path / "data"));
  const json first = svc.ingest(golden_events(), "same");
  const auto digest = svc.inspect([](const orchestrate::Engine& e) { return e.state_digest(); });
  const auto records = svc.inspect([](const orchestrate::Engine& e) { return e.audit().size(); });
  const json second = svc.ingest(golden_events(), "same");
  EXPECT_EQ(first, second);
  EXPECT_EQ(svc.inspect([](const orchestrate::Engine& e) { return e.state_digest(); }), digest);
  EXPECT_EQ(svc.inspect([](const orchestrate::Engine& e) { return e.audit().size(); }), records);

  const std::string hid = svc.escalations()[0]["escalation_id"];
  svc.decide(hid, "confirm", "ok", "analyst-1", "dec");
  EXPECT_EQ(svc.decide(hid, "confirm", "ok", "analyst-1", "dec")["state"], "SUBMITTED");
  // A failed command replays its error.
  EXPECT_EQ(code_of([&] { svc.decide(hid, "confirm", "ok", "analyst-1", "dec-2"); }), ErrorCode::NotPending);
  EXPECT_EQ(code_of([&] { svc.decide(hid, "confirm", "ok", "analyst-1", "dec-2"); }), ErrorCode::NotPending);
}

TEST(Service, RestartReplaysToSameState) {
  props::TempDir dir("svc");
  std::string digest, head;
  json cases;
  {
    ComplianceService svc(golden_config(dir.path / "data"));
    auto events = golden_events();
    svc.ingest(std::vector(events.begin(), events.begin() + 10), "b1");
    svc.ingest(std::vector(events.begin() + 10, events.end()), "b2");
    svc.decide(svc.escalations()[0]["escalation_id"], "confirm", "ok", "analyst-1", "d1");
    svc.calibrate("cal-1");
    digest = svc.inspect([](const orchestrate::Engine& e) { return e.state_digest(); });
    head = svc.inspect([](const orchestrate::Engine& e) { return e.audit().head_hash(); });
    cases = svc.cases(std::nullopt);
  }
  ComplianceService again(golden_config(dir.path / "data"));
  EXPECT_EQ(again.inspect([](const orchestrate::Engine& e) { return e.state_digest(); }), digest);
  EXPECT_EQ(again.inspect([](const orchestrate::Engine& e) { return e.audit().head_hash(); }), head);
  EXPECT_EQ(again.cases(std::nullopt), cases);
  EXPECT_TRUE(again.audit_verify()["ok"].get<bool>());
}

TEST(Service, TamperedAuditRefusesToStart) {
  props::TempDir dir("svc");
  std::filesystem::path audit_file;
  {
    ComplianceService svc(golden_config(dir.path / "data"));
    svc.ingest(golden_events(), "b1");
    audit_file = svc.audit_path();
  }
  std::string text = file_text(audit_file);
  const auto pos = text.find("Drafted");
  ASSERT_NE(pos, std::string::npos);
  text[pos] = 'd';
  std::ofstream(audit_file, std::ios::binary | std::ios::trunc) << text;
  EXPECT_EQ(code_of([&] { ComplianceService svc(golden_config(dir.path / "data")); }), ErrorCode::ChainBroken);
}

TEST(Service, GenerateOnlyInDevMode) {
  props::TempDir dir("svc");
  ingest::GeneratorConfig g;
  g.n_transactions = 5000;
  g.n_wallets = 500;
  g.n_collections = 10;
  {
    ComplianceService svc(golden_config(dir.path / "prod", false));
    EXPECT_EQ(code_of([&] { svc.generate(g, "g1"); }), ErrorCode::InvalidConfig);
  }
  ComplianceService svc(golden_config(dir.path / "dev", true));
  const json out = svc.generate(g, "g1");
  EXPECT_EQ(out["summary"]["accepted"], 5000);
  EXPECT_EQ(out["transactions"], 5000);
  EXPECT_TRUE(std::filesystem::exists(dir.path / "dev" / "labels" / "g1.jsonl"));
}

TEST(Service, ReadsAndErrors) {
  props::TempDir dir("svc");
  ComplianceService svc(golden_config(dir.path / "data"));
  svc.ingest(golden_events(), "b1");
  EXPECT_EQ(svc.alerts(std::nullopt, std::string("WASH_TRADING")).size(), 2u);
  EXPECT_EQ(svc.alerts(std::string("0xfb2da812e2333d85d631d63334d33c7116d06d54"), std::nullopt).size(), 3u);
  EXPECT_EQ(svc.cases(std::string("PENDING_REVIEW")).size(), 1u);
  const std::string case_id = svc.cases(std::nullopt)[0]["case_id"];
  const json detail = svc.case_detail(case_id);
  EXPECT_FALSE(detail["audit"].empty());
  EXPECT_EQ(detail["report"]["report_id"], "STR-000001");
  EXPECT_NE(svc.report_text("STR-000001").find("score of 10"), std::string::npos);
  EXPECT_EQ(code_of([&] { svc.report_json("STR-404"); }), ErrorCode::NotFound);
  EXPECT_EQ(code_of([&] { svc.case_detail("CASE-404"); }), ErrorCode::UnknownCase);
  EXPECT_EQ(code_of([&] { svc.decide("HO-404", "confirm", "x", "a", ""); }), ErrorCode::UnknownEscalation);
  EXPECT_EQ(http_status(ErrorCode::UnknownEscalation), 404);
  EXPECT_EQ(http_status(ErrorCode::NotPending), 409);
  EXPECT_EQ(http_status(ErrorCode::MalformedValue), 400);
  EXPECT_EQ(http_status(ErrorCode::ChainBroken), 500);
  const json cost = svc.cost_report({{"U", "100000"}, {"R", "100"}, {"s", "0.045"}});
  EXPECT_EQ(cost["manual_fte"], "480");
}

TEST(Service, OutOfOrderBatchRejectedWhole) {
  props::TempDir dir("svc");
  ComplianceService svc(golden_config(dir.path / "data"));
  auto events = golden_events();
  std::swap(events[0], events[5]);
  EXPECT_EQ(code_of([&] { svc.ingest(events, "bad"); }), ErrorCode::OutOfOrderBatch);
  EXPECT_TRUE(svc.alerts(std::nullopt, std::nullopt).empty());
  EXPECT_EQ(svc.ingest(golden_events(), "good")["accepted"], 24);
}
