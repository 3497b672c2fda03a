#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/agent.hpp"
#include "fcc/investigate/case_context.hpp"
#include "fcc/investigate/semantic_cache.hpp"

namespace fcc::orchestrate {

enum class CaseState {
  New,
  Triaged,
  Investigating,
  AutoClosed,
  Escalated,
  StrDrafted,
  PendingReview,
  Submitted,
  Rejected,
};

enum class CaseEvent {
  AlertsAggregated,
  StartInvestigation,
  AutoClose,
  Escalate,
  StrDrafted,
  HandoverCreated,
  AnalystConfirm,
  AnalystDismiss,
};

std::string_view to_string(CaseState s);
std::string_view to_string(CaseEvent e);
std::optional<CaseState> parse_case_state(std::string_view text);
bool is_terminal(CaseState s);

/// Legal-transition table. Throws Error(IllegalTransition) naming the
/// current state and event.
CaseState next_state(CaseState current, CaseEvent event);

struct HistoryEntry {
  CaseState state = CaseState::New;
  Timestamp at{};
  std::uint64_t audit_seq = 0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct HumanDecision {
  std::string decision;  // "confirm" or "dismiss"
  std::string analyst;
  std::string rationale;
  Timestamp decided_at{};

  friend bool operator==(const HumanDecision&, const HumanDecision&) = default;
};

inline constexpr std::string_view kHuman = "HUMAN";

struct HandoverRequest {
  std::string handover_id;
  AgentIdentity from;
  std::string to;  // agent name or "HUMAN"
  std::string case_id;
  std::string reason;
  std::string payload_digest;
  Timestamp created_at{};
  bool acknowledged = false;
  std::optional<HumanDecision> decision;

  bool to_human() const { return to == kHuman; }
  nlohmann::json to_json() const;
  friend bool operator==(const HandoverRequest&, const HandoverRequest&) = default;
};

struct CaseRecord {
  std::string case_id;
  CaseState state = CaseState::New;
  investigate::CaseContext context;
  std::optional<investigate::Disposition> disposition;
  std::optional<std::string> report_id;
  std::vector<HistoryEntry> history;
  bool human_required = false;  // a guardrail demanded human review
  std::string model_profile_id;

  nlohmann::json to_json() const;
  /// Compact form for listings.
  nlohmann::json summary_json() const;
  friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

}  // namespace fcc::orchestrate
