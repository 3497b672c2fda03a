#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/agent.hpp"
#include "fcc/monitor/alert.hpp"

namespace fcc::orchestrate {

// Action names used in policies and audit records.
namespace action {
inline constexpr std::string_view kIngestBatch = "INGEST_BATCH";
inline constexpr std::string_view kScreenWallet = "SCREEN_WALLET";
inline constexpr std::string_view kEvaluateTrade = "EVALUATE_TRADE";
inline constexpr std::string_view kAggregate = "AGGREGATE";
inline constexpr std::string_view kOpenCase = "OPEN_CASE";
inline constexpr std::string_view kReadCase = "READ_CASE";
inline constexpr std::string_view kInvestigate = "INVESTIGATE";
inline constexpr std::string_view kCacheWrite = "CACHE_WRITE";
inline constexpr std::string_view kDraftStr = "DRAFT_STR";
inline constexpr std::string_view kRender = "RENDER";
inline constexpr std::string_view kTransition = "TRANSITION";
inline constexpr std::string_view kHandover = "HANDOVER";
inline constexpr std::string_view kRoute = "ROUTE";
inline constexpr std::string_view kSubmitStr = "SUBMIT_STR";
inline constexpr std::string_view kDecideCase = "DECIDE_CASE";
}  // namespace action

/// Actions only a human may take; no agent policy may list them.
bool is_human_reserved(std::string_view action_name);

struct GuardrailPolicy {
  AgentId agent = AgentId::Orchestrator;
  std::set<std::string> allowed_actions;
  monitor::RiskBand max_auto_band = monitor::RiskBand::ModerateHigh;
  std::set<std::string> data_scopes;

  friend bool operator==(const GuardrailPolicy&, const GuardrailPolicy&) = default;
};

class PolicySet {
 public:
  static PolicySet defaults();
  /// Overrides per agent; agents absent from `j` keep their defaults.
  static PolicySet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Throws Error(InvalidConfig) when a policy lists a human-reserved action.
  void validate() const;
  const GuardrailPolicy* find(AgentId agent) const;
  void set(GuardrailPolicy policy);
  const std::map<AgentId, GuardrailPolicy>& policies() const { return policies_; }

 private:
  std::map<AgentId, GuardrailPolicy> policies_;
};

enum class Verdict { Allow, Block, RequireHandover };

std::string_view to_string(Verdict v);

struct GuardrailDecision {
  Verdict verdict = Verdict::Allow;
  std::string reason;
  std::string target;  // "HUMAN" for REQUIRE_HANDOVER, empty otherwise

  /// "ALLOW", "BLOCK(reason)" or "REQUIRE_HANDOVER(HUMAN)".
  std::string to_string() const;
  friend bool operator==(const GuardrailDecision&, const GuardrailDecision&) = default;
};

/// Resource kind an action reads, if it is scope-checked.
std::optional<std::string> required_scope(std::string_view action_name);

/// Human-reserved actions always hand over to a human. Otherwise the
/// action must be allowed (and its data scope granted) or it is blocked;
/// an allowed action on a case above the agent's max_auto_band requires a
/// human handover. Throws Error(UnknownAgent) when no policy exists.
GuardrailDecision enforce_guardrail(AgentId agent, std::string_view action_name,
                                    std::optional<monitor::RiskBand> case_band, const PolicySet& policies);

}  // namespace fcc::orchestrate
