#include "fcc/orchestrate/case_record.hpp"

#include <nlohmann/json.hpp>

#include <set>

#include "fcc/common/error.hpp"

namespace fcc::orchestrate {

std::string_view to_string(CaseState s) {
  switch (s) {
    case CaseState::New: return "NEW";
    case CaseState::Triaged: return "TRIAGED";
    case CaseState::Investigating: return "INVESTIGATING";
    case CaseState::AutoClosed: return "AUTO_CLOSED";
    case CaseState::Escalated: return "ESCALATED";
    case CaseState::StrDrafted: return "STR_DRAFTED";
    case CaseState::PendingReview: return "PENDING_REVIEW";
    case CaseState::Submitted: return "SUBMITTED";
    case CaseState::Rejected: return "REJECTED";
  }
  return "UNKNOWN";
}

std::string_view to_string(CaseEvent e) {
  switch (e) {
    case CaseEvent::AlertsAggregated: return "ALERTS_AGGREGATED";
    case CaseEvent::StartInvestigation: return "START_INVESTIGATION";
    case CaseEvent::AutoClose: return "AUTO_CLOSE";
    case CaseEvent::Escalate: return "ESCALATE";
    case CaseEvent::StrDrafted: return "STR_DRAFTED";
    case CaseEvent::HandoverCreated: return "HANDOVER_CREATED";
    case CaseEvent::AnalystConfirm: return "ANALYST_CONFIRM";
    case CaseEvent::AnalystDismiss: return "ANALYST_DISMISS";
  }
  return "UNKNOWN";
}

std::optional<CaseState> parse_case_state(std::string_view text) {
  for (auto s : {CaseState::New, CaseState::Triaged, CaseState::Investigating, CaseState::AutoClosed,
                 CaseState::Escalated, CaseState::StrDrafted, CaseState::PendingReview, CaseState::Submitted,
                 CaseState::Rejected}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool is_terminal(CaseState s) {
  return s == CaseState::AutoClosed || s == CaseState::Submitted || s == CaseState::Rejected;
}

CaseState next_state(CaseState current, CaseEvent event) {
  using S = CaseState;
  using E = CaseEvent;
  switch (current) {
    case S::New:
      if (event == E::AlertsAggregated) return S::Triaged;
      break;
    case S::Triaged:
      if (event == E::StartInvestigation) return S::Investigating;
      break;
    case S::Investigating:
      if (event == E::AutoClose) return S::AutoClosed;
      if (event == E::Escalate) return S::Escalated;
      break;
    case S::Escalated:
      if (event == E::StrDrafted) return S::StrDrafted;
      break;
    case S::StrDrafted:
      if (event == E::HandoverCreated) return S::PendingReview;
      break;
    case S::PendingReview:
      if (event == E::AnalystConfirm) return S::Submitted;
      if (event == E::AnalystDismiss) return S::Rejected;
      break;
    case S::AutoClosed:
    case S::Submitted:
    case S::Rejected:
      break;
  }
  throw Error(ErrorCode::IllegalTransition, std::string(to_string(current)) + " + " + std::string(to_string(event)));
}

nlohmann::json HandoverRequest::to_json() const {
  nlohmann::json j = {
      {"handover_id", handover_id},
      {"from", fcc::to_string(from.id)},
      {"to", to},
      {"case_id", case_id},
      {"reason", reason},
      {"payload_digest", payload_digest},
      {"created_at", format_rfc3339(created_at)},
      {"acknowledged", acknowledged},
      {"decision", nullptr},
  };
  if (decision) {
    j["decision"] = {
        {"decision", decision->decision},
        {"analyst", decision->analyst},
        {"rationale", decision->rationale},
        {"decided_at", format_rfc3339(decision->decided_at)},
    };
  }
  return j;
}

nlohmann::json CaseRecord::to_json() const {
  nlohmann::json history_json = nlohmann::json::array();
  for (const auto& h : history) {
    history_json.push_back({{"state", to_string(h.state)}, {"at", format_rfc3339(h.at)}, {"audit_seq", h.audit_seq}});
  }
  return {
      {"case_id", case_id},
      {"state", to_string(state)},
      {"context", investigate::to_json(context)},
      {"disposition", disposition ? disposition->to_json() : nlohmann::json()},
      {"report_id", report_id ? nlohmann::json(*report_id) : nlohmann::json()},
      {"history", history_json},
      {"human_required", human_required},
      {"model_profile_id", model_profile_id},
  };
}

nlohmann::json CaseRecord::summary_json() const {
  std::set<std::string> types;
  for (const auto& a : context.alerts) types.insert(std::string(monitor::to_string(a.type)));
  return {
      {"case_id", case_id},
      {"state", to_string(state)},
      {"risk_score", context.risk.score},
      {"band", monitor::to_string(context.risk.band)},
      {"alert_types", types},
      {"flagged_tx", context.flagged_tx},
      {"opened_at", history.empty() ? nlohmann::json() : nlohmann::json(format_rfc3339(history.front().at))},
      {"report_id", report_id ? nlohmann::json(*report_id) : nlohmann::json()},
  };
}

}  // namespace fcc::orchestrate
