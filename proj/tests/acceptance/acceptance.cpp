// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcc/audit/audit_log.hpp"
#include "fcc/ingest/generator.hpp"
#include "fcc/monitor/evaluation.hpp"
#include "fcc/orchestrate/engine.hpp"
#include "fcc/service/compliance_service.hpp"
#include "fcc/service/cost_model.hpp"
#include "properties.hpp"

using namespace fcc;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

// ---- 1 --------------------------------------------------------------------

Check golden_case() {
  Check c;
  const auto t0 = Clock::now();
  orchestrate::Engine eng;
  eng.seed_wallets(props::golden_registry());
  eng.run_pipeline(props::read_stream(props::golden_dir() / "stream.jsonl"), "golden");
  const double elapsed = seconds_since(t0);

  bool nw10 = false;
  for (const auto& a : eng.monitor().alerts()) nw10 = nw10 || (a.type == monitor::AlertType::NewWallet && a.score == 10);
  c.expect(nw10, "no NEW_WALLET alert with score 10");
  c.expect(eng.cases().size() == 1, "expected exactly one case");
  if (eng.cases().size() != 1) return c;
  const auto& rec = eng.cases().begin()->second;
  c.expect(rec.context.risk.score == 70, "case score " + std::to_string(rec.context.risk.score));
  c.expect(rec.context.risk.band == monitor::RiskBand::ModerateHigh, "band is not MODERATE_HIGH");
  bool escalated = false;
  for (const auto& h : rec.history) escalated = escalated || h.state == orchestrate::CaseState::Escalated;
  c.expect(escalated, "case never reached ESCALATED");
  c.expect(rec.report_id.has_value(), "no STR drafted");
  if (!rec.report_id) return c;
  const auto& str = eng.reports().at(*rec.report_id);
  c.expect(contains(str.narrative, str.flagged_tx), "narrative lacks the flagged tx");
  c.expect(contains(str.narrative, "buyer") && contains(str.narrative, "seller"), "narrative lacks a wallet role");
  for (const auto& s : str.subjects) c.expect(contains(str.narrative, s.address), "narrative lacks " + s.address);
  c.expect(contains(str.narrative, "score of 10"), "narrative lacks 'score of 10'");
  c.expect(contains(str.narrative, "moderate to high (70)"), "narrative lacks 'moderate to high (70)'");
  c.expect(!str.recommendation.empty() && contains(str.narrative, str.recommendation), "no recommendation");
  c.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + "s");
  c.notes.push_back("runtime " + std::to_string(elapsed) + "s");
  return c;
}

// ---- 2 and 3 --------------------------------------------------------------

struct SyntheticRun {
  ingest::SyntheticStream stream;
  monitor::DetectionReport report;
  double seconds = 0;
};

const SyntheticRun& synthetic() {
  static const SyntheticRun run = [] {
    SyntheticRun r;
    const auto t0 = Clock::now();
    ingest::GeneratorConfig cfg;  // 100,000 transactions, target 0.045
    r.stream = ingest::generate_synthetic(cfg);
    orchestrate::Engine eng;
    eng.run_pipeline(r.stream.events, "synthetic");
    r.report = monitor::evaluate_detection(r.stream.labels, eng.monitor().alerts());
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Check synthetic_rates() {
  Check c;
  const auto& r = synthetic();
  const double frac = r.report.suspicious_fraction();
  c.expect(r.report.transactions == 100'000, "transactions " + std::to_string(r.report.transactions));
  c.expect(frac >= 0.040 && frac <= 0.050, "suspicious fraction " + std::to_string(frac));
  c.expect(r.report.recall() == 1.0, "recall " + std::to_string(r.report.recall()) + ", missed " +
                                         std::to_string(r.report.missed_rings.size()));
  c.expect(r.report.false_positive_rate() <= 0.02, "false-positive rate " + std::to_string(r.report.false_positive_rate()));
  c.expect(r.seconds < 120, "runtime " + std::to_string(r.seconds) + "s");
  c.notes.push_back("fraction " + std::to_string(frac) + ", rings " + std::to_string(r.report.planted_rings) +
                    ", recall " + std::to_string(r.report.recall()) + ", fp rate " +
                    std::to_string(r.report.false_positive_rate()) + ", runtime " + std::to_string(r.seconds) + "s");
  return c;
}

Check multiplicity() {
  Check c;
  const auto& r = synthetic();
  const double m = static_cast<double>(r.report.total_alerts) / static_cast<double>(r.report.suspicious_transactions);
  c.expect(m >= 1.5, "alerts / suspicious " + std::to_string(m));
  c.notes.push_back(std::to_string(r.report.total_alerts) + " alerts over " +
                    std::to_string(r.report.suspicious_transactions) + " suspicious transactions = " +
                    std::to_string(m));
  return c;
}

// ---- 4 --------------------------------------------------------------------

Check cost_model() {
  using service::Rational;
  Check c;
  service::CostModelParams p;
  p.users = 100'000;
  p.tx_per_user = 100;
  p.suspicion_rate = Rational(45, 1000);
  p.manual_hours_per_alert = 2;
  p.fte_hours_per_year = 1875;
  const auto r = service::compute_cost_report(p);
  c.expect(r.alerts_per_year == 450'000, "alerts " + r.alerts_per_year.str());
  c.expect(r.manual_hours == 900'000, "hours " + r.manual_hours.str());
  c.expect(r.manual_fte == 480, "fte " + r.manual_fte.str());
  p.manual_hours_per_alert = Rational(198, 100);
  const auto r2 = service::compute_cost_report(p);
  c.expect(r2.manual_hours == 891'000, "hours at 1.98 " + r2.manual_hours.str());
  for (int secs : {1, 30, 60}) {
    p.automated_seconds_per_case = secs;
    c.expect(service::compute_cost_report(p).reduction_fraction > Rational(98, 100),
             "reduction at " + std::to_string(secs) + "s");
  }
  return c;
}

// ---- 5 --------------------------------------------------------------------

Check audit_tamper() {
  Check c;
  const auto t0 = Clock::now();
  audit::AuditLog log;
  for (int i = 0; i < 10; ++i) {
    audit::AuditEntry e;
    e.timestamp = oracle::at(i * 60);
    e.agent.id = static_cast<AgentId>(i % kAllAgents.size());
    e.action = i % 2 == 0 ? "TRANSITION" : "INVESTIGATE";
    e.case_id = "CASE-00000" + std::to_string(i % 3);
    if (i % 4 == 0) e.tx_id = "0x" + std::string(64, static_cast<char>('a' + i % 6));
    e.rationale = "record " + std::to_string(i) + " rationale";
    e.input_digest = audit::digest_of("input " + std::to_string(i));
    log.append(e);
  }
  std::string file;
  for (const auto& r : log.records()) file += audit::serialize_record(r) + "\n";
  c.expect(!audit::verify_persisted(file), "untampered log does not verify");

  std::size_t mutations = 0, missed = 0;
  for (std::size_t i = 0; i < file.size(); ++i) {
    const char original = file[i];
    for (int v = 0; v < 256; ++v) {
      if (static_cast<char>(v) == original) continue;
      file[i] = static_cast<char>(v);
      ++mutations;
      if (!audit::verify_persisted(file)) ++missed;
    }
    file[i] = original;
  }
  const double elapsed = seconds_since(t0);
  c.expect(missed == 0, std::to_string(missed) + " undetected mutations");
  c.expect(elapsed < 30, "runtime " + std::to_string(elapsed) + "s");
  c.notes.push_back(std::to_string(mutations) + " mutations over " + std::to_string(file.size()) + " bytes, runtime " +
                    std::to_string(elapsed) + "s");
  return c;
}

// ---- 6, 7, 8 --------------------------------------------------------------

Check optimizer_oracle() {
  Check c;
  const auto rep = props::optimizer_property(6, 200);
  c.expect(rep.histories == 200, "histories");
  c.expect(rep.mismatches == 0, std::to_string(rep.mismatches) + " mismatches");
  c.expect(rep.ties > 0, "no history exercised tie-breaking");
  for (const auto& e : rep.examples) c.notes.push_back(e);
  c.notes.push_back(std::to_string(rep.ties) + " histories with tied minima");
  return c;
}

Check detector_oracles() {
  Check c;
  const auto rep = props::detector_property(7, 600);
  for (const auto& [name, n] : rep.discrepancies) c.expect(n == 0, name + ": " + std::to_string(n));
  for (const auto& [name, n] : rep.fired) c.expect(n > 0, name + " never fired");
  for (const auto& e : rep.examples) c.notes.push_back(e);
  c.notes.push_back(std::to_string(rep.streams) + " streams");
  return c;
}

Check governance() {
  Check c;
  const auto rep = props::governance_property(8, 200);
  c.expect(rep.violations.empty(), std::to_string(rep.violations.size()) + " violations");
  c.expect(rep.submitted > 0, "no run reached SUBMITTED");
  c.expect(rep.blocks + rep.probe_blocks > 0, "no guardrail blocks exercised");
  for (const auto& v : rep.violations) c.notes.push_back(v);
  c.notes.push_back(std::to_string(rep.runs) + " runs, " + std::to_string(rep.cases) + " cases, " +
                    std::to_string(rep.submitted) + " submitted, " + std::to_string(rep.transitions) +
                    " transitions, " + std::to_string(rep.blocks) + " pipeline blocks, " +
                    std::to_string(rep.probe_blocks) + " probe blocks");
  return c;
}

// ---- 9 --------------------------------------------------------------------

std::string alert_log(const orchestrate::Engine& eng) {
  std::string out;
  for (const auto& a : eng.monitor().alerts()) out += monitor::to_json(a).dump() + "\n";
  return out;
}

Check determinism() {
  Check c;
  ingest::GeneratorConfig g;
  g.n_transactions = 20'000;
  g.n_wallets = 4'000;
  g.n_collections = 200;
  g.seed = 99;
  const auto s1 = ingest::generate_synthetic(g);
  const auto s2 = ingest::generate_synthetic(g);
  c.expect(s1.events == s2.events && s1.labels == s2.labels, "generator not deterministic");

  orchestrate::Engine a, b;
  a.run_pipeline(s1.events, "r");
  b.run_pipeline(s2.events, "r");
  c.expect(alert_log(a) == alert_log(b), "alert logs differ");
  c.expect(a.state_json().dump() == b.state_json().dump(), "case states differ");
  c.expect(a.audit().head_hash() == b.audit().head_hash(), "audit heads differ");

  // Restart and replay.
  props::TempDir dir("accept");
  const auto cfg = service::ServiceConfig::from_json(
      {{"data_dir", (dir.path / "data").string()},
       {"wallet_registry", (props::golden_dir() / "registry.jsonl").string()}},
      props::golden_dir());
  const auto events = props::read_stream(props::golden_dir() / "stream.jsonl");
  std::string digest, cache, theta;
  {
    service::ComplianceService svc(cfg);
    svc.ingest(std::vector(events.begin(), events.begin() + 12), "b1");
    svc.ingest(std::vector(events.begin() + 12, events.end()), "b2");
    const std::string hid = svc.escalations()[0]["escalation_id"];
    svc.decide(hid, "dismiss", "known counterparty", "analyst-1", "d1");
    svc.calibrate("c1");
    digest = svc.inspect([](const orchestrate::Engine& e) { return e.state_digest(); });
    cache = svc.inspect([](const orchestrate::Engine& e) { return e.cache().to_json().dump(); });
    theta = svc.optimizer().dump();
  }
  service::ComplianceService again(cfg);
  c.expect(again.inspect([](const orchestrate::Engine& e) { return e.state_digest(); }) == digest,
           "state digest differs after restart");
  c.expect(again.inspect([](const orchestrate::Engine& e) { return e.cache().to_json().dump(); }) == cache,
           "cache differs after restart");
  c.expect(again.optimizer().dump() == theta, "theta differs after restart");
  c.expect(again.audit_verify()["ok"].get<bool>(), "audit chain broken after restart");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "golden case end to end", golden_case},
      {2, "synthetic suspicious rate, recall and false positives", synthetic_rates},
      {3, "alert multiplicity", multiplicity},
      {4, "cost model anchor values", cost_model},
      {5, "audit tamper evidence", audit_tamper},
      {6, "optimizer matches brute force", optimizer_oracle},
      {7, "detectors match brute force", detector_oracles},
      {8, "governance trace", governance},
      {9, "determinism and replay", determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check result;
    const auto t0 = Clock::now();
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.notes.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(t0);
    std::printf("%s criterion %d: %s (%.2fs)\n", result.ok ? "PASS" : "FAIL", cr.id, cr.name, elapsed);
    for (const auto& n : result.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += result.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
