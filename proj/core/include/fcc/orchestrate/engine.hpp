#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/audit/audit_log.hpp"
#include "fcc/ingest/event_store.hpp"
#include "fcc/investigate/optimizer.hpp"
#include "fcc/investigate/semantic_cache.hpp"
#include "fcc/monitor/monitor.hpp"
#include "fcc/orchestrate/case_record.hpp"
#include "fcc/orchestrate/guardrails.hpp"
#include "fcc/orchestrate/model_router.hpp"
#include "fcc/report/str_report.hpp"

namespace fcc::orchestrate {

struct EngineConfig {
  monitor::RulesetConfig ruleset;
  screening::ScreeningLists lists;
  investigate::OptimizerState optimizer;
  PolicySet policies = PolicySet::defaults();
  std::vector<ModelProfile> models;
  Decimal compliance_baseline = Decimal::from_micros(800'000);
  TaskDescriptor investigate_task;
  std::string reporting_entity = "FCC Compliance Desk";

  /// Throws Error(InvalidConfig).
  void validate() const;
};

struct PipelineSummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t first_seen_wallets = 0;
  std::size_t alerts = 0;
  std::size_t cases_opened = 0;
  std::size_t auto_closed = 0;
  std::size_t escalated = 0;
  std::size_t strs_drafted = 0;
  std::size_t blocked = 0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> audit_seq_range;  // inclusive

  nlohmann::json to_json() const;
  friend bool operator==(const PipelineSummary&, const PipelineSummary&) = default;
};

/// The orchestrator. Owns every piece of mutable state and is the single
/// writer; callers serialize access. Each mutation writes its audit record
/// before applying the effect.
class Engine {
 public:
  explicit Engine(EngineConfig config = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Onboarding registry: seeds wallet profiles and screens each wallet.
  void seed_wallets(std::span<const screening::RegistryEntry> entries, const std::string& request_id = "");

  /// Ingest, screen, monitor, group alerts into cases and drive each case
  /// through triage, investigation and reporting. Errors from ingest
  /// propagate with no state change.
  PipelineSummary run_pipeline(std::span<const ingest::TradeEvent> batch, const std::string& request_id = "");

  /// Human decision on a review handover. `decision` is "confirm" or
  /// "dismiss". Throws UnknownEscalation, NotPending, EmptyRationale.
  const CaseRecord& decide(const std::string& handover_id, const std::string& decision, const std::string& rationale,
                           const std::string& analyst, Timestamp at, const std::string& request_id = "");

  /// Throws UnknownCase, NotEscalated, DuplicateFeedback.
  investigate::FeedbackRecord record_feedback(const std::string& case_id, investigate::AnalystLabel label, Timestamp at,
                                              const std::string& request_id = "");

  /// Runs the threshold optimizer over the feedback history.
  investigate::ThresholdResult calibrate(Timestamp at, const std::string& request_id = "");

  /// Applies one pass/fail outcome to a model profile.
  const ModelProfile& score_model(const std::string& profile_id, bool pass, Timestamp at,
                                  const std::string& request_id = "");

  /// An agent asks to perform `action_name` on a case. Only the guardrail
  /// decision is recorded; nothing else changes. Throws UnknownCase,
  /// UnknownAgent.
  GuardrailDecision request_action(AgentId agent, const std::string& action_name, const std::string& case_id,
                                   Timestamp at, const std::string& request_id = "");

  const EngineConfig& config() const { return config_; }
  const audit::AuditLog& audit() const { return audit_; }
  audit::AuditLog& audit() { return audit_; }
  const ingest::EventStore& store() const { return store_; }
  const monitor::Monitor& monitor() const { return monitor_; }
  const std::map<std::string, CaseRecord>& cases() const { return cases_; }
  const CaseRecord* find_case(const std::string& case_id) const;
  const std::map<std::string, HandoverRequest>& handovers() const { return handovers_; }
  const HandoverRequest* find_handover(const std::string& handover_id) const;
  /// Unacknowledged handovers addressed to a human.
  std::vector<const HandoverRequest*> pending_escalations() const;
  const std::map<std::string, report::StrReport>& reports() const { return reports_; }
  const report::StrReport* find_report(const std::string& report_id) const;
  const investigate::SemanticCache& cache() const { return cache_; }
  const investigate::ReinforcementCache& feedback() const { return feedback_; }
  const investigate::OptimizerState& optimizer() const { return optimizer_; }
  const ModelRegistry& registry() const { return registry_; }

  /// SHA-256 over cases, reports, alerts, cache, feedback, theta and the
  /// model registry. Excludes the audit log and handovers.
  std::string state_digest() const;
  nlohmann::json state_json() const;

  /// Called after an STR is drafted / submitted, before the case moves on.
  std::function<void(const report::StrReport&)> on_report_drafted;
  std::function<void(const report::StrReport&)> on_report_submitted;

 private:
  struct CaseRun;

  const audit::AuditRecord& record(AgentId agent, std::string_view action_name, std::string rationale, Timestamp at,
                                   const std::optional<std::string>& case_id, const std::optional<std::string>& tx_id,
                                   std::string_view input, const std::string& request_id);
  GuardrailDecision guard(CaseRun& run, AgentId agent, std::string_view action_name);
  bool transition(CaseRun& run, CaseEvent event, std::string why);
  HandoverRequest& open_handover(CaseRun& run, AgentId from, std::string to, std::string reason, bool acknowledged);
  void process_case(std::vector<monitor::Alert> alerts, PipelineSummary& summary, const std::string& request_id);
  void screen_once(const std::string& wallet, Timestamp at, const std::string& request_id);
  investigate::FeedbackRecord add_feedback(const CaseRecord& c, investigate::AnalystLabel label, Timestamp at,
                                           const std::string& request_id);
  void after_feedback(Timestamp at, const std::string& request_id);
  investigate::ExclusionCheck exclusion() const;

  EngineConfig config_;
  ingest::EventStore store_;
  monitor::Monitor monitor_;
  audit::AuditLog audit_;
  investigate::SemanticCache cache_;
  investigate::ReinforcementCache feedback_;
  investigate::OptimizerState optimizer_;
  ModelRegistry registry_;
  std::set<std::string> screened_;
  std::map<std::string, CaseRecord> cases_;
  std::map<std::string, HandoverRequest> handovers_;
  std::map<std::string, report::StrReport> reports_;
  std::map<std::string, std::size_t> unacked_;  // open handovers per case
  std::size_t next_case_ = 1;
  std::size_t next_handover_ = 1;
  std::size_t next_report_ = 1;
};

/// Connected groups of alerts: alerts sharing a wallet subject or a
/// transaction are linked when raised within `window` of each other.
/// Groups are ordered by their first alert.
std::vector<std::vector<monitor::Alert>> group_alerts(std::span<const monitor::Alert> alerts, seconds window);

}  // namespace fcc::orchestrate
