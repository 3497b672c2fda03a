#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/investigate/case_context.hpp"
#include "fcc/monitor/alert.hpp"
#include "fcc/orchestrate/case_record.hpp"

namespace fcc::report {

struct AlertSummary {
  std::string alert_id;
  monitor::AlertType type = monitor::AlertType::NewWallet;
  std::string subject;
  int score = 0;
  std::string evidence;

  friend bool operator==(const AlertSummary&, const AlertSummary&) = default;
};

/// Suspicious transaction report. Every narrative sentence is rendered
/// from these fields.
struct StrReport {
  std::string report_id;
  int version = 1;
  std::optional<std::string> supersedes;
  std::string case_id;
  Timestamp created_at{};
  std::string reporting_entity;
  std::vector<investigate::SubjectWallet> subjects;
  std::string flagged_tx;
  std::vector<std::string> tx_refs;
  std::string trigger_alert_id;
  std::vector<AlertSummary> alert_summary;  // trigger first, then raise order
  investigate::BehaviorSummary findings;
  int risk_score = 0;
  monitor::RiskBand risk_band = monitor::RiskBand::Low;
  bool screening_clean = true;
  std::string screening_summary;
  std::string narrative;
  std::string recommendation;
  std::string regulatory_basis = "AML-STR";
  std::vector<std::uint64_t> audit_refs;

  nlohmann::json to_json() const;
  /// Throws Error(MalformedValue) naming the offending field.
  static StrReport from_json(const nlohmann::json& j);
  friend bool operator==(const StrReport&, const StrReport&) = default;
};

struct DraftOptions {
  std::string report_id;
  Timestamp created_at{};
  std::string reporting_entity = "FCC Compliance Desk";
  std::string regulatory_basis = "AML-STR";
  std::vector<std::uint64_t> audit_refs;
};

/// Throws Error(NotEscalated) unless the case is ESCALATED, and
/// Error(NotRecommended) unless its disposition recommends an STR.
StrReport draft_str(const orchestrate::CaseRecord& record, const DraftOptions& options);

/// Deterministic six-part narrative; a pure function of the report.
std::string render_narrative(const StrReport& report);

/// Optional cross-reference resolvers; unset members skip that check.
struct ValidationContext {
  std::function<bool(const std::string& tx_id)> tx_known;
  std::function<bool(std::uint64_t seq)> audit_known;
};

/// Empty result means the report is valid.
std::vector<std::string> validate_report(const StrReport& report, const ValidationContext& context = {});

}  // namespace fcc::report
