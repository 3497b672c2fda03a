#include "fcc/orchestrate/guardrails.hpp"

#include <nlohmann/json.hpp>

#include "fcc/common/error.hpp"

namespace fcc::orchestrate {
namespace {

GuardrailPolicy policy(AgentId agent, std::set<std::string> actions, std::set<std::string> scopes) {
  return GuardrailPolicy{agent, std::move(actions), monitor::RiskBand::ModerateHigh, std::move(scopes)};
}

std::set<std::string> string_set(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, where);
  std::set<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(ErrorCode::InvalidConfig, where);
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

bool is_human_reserved(std::string_view action_name) {
  return action_name == action::kSubmitStr || action_name == action::kDecideCase;
}

PolicySet PolicySet::defaults() {
  PolicySet set;
  set.set(policy(AgentId::Ingest, {"INGEST_BATCH"}, {"events"}));
  set.set(policy(AgentId::Screening, {"SCREEN_WALLET"}, {"profiles", "lists"}));
  set.set(policy(AgentId::Monitoring, {"EVALUATE_TRADE"}, {"events", "profiles"}));
  set.set(policy(AgentId::Triage, {"AGGREGATE", "OPEN_CASE"}, {"alerts", "cases"}));
  set.set(policy(AgentId::Investigation, {"READ_CASE", "INVESTIGATE", "CACHE_WRITE"},
                 {"events", "profiles", "alerts", "cases", "cache"}));
  set.set(policy(AgentId::Reporting, {"DRAFT_STR", "RENDER"}, {"cases", "reports"}));
  set.set(policy(AgentId::Orchestrator, {"TRANSITION", "HANDOVER", "ROUTE"}, {"cases", "models"}));
  return set;
}

PolicySet PolicySet::from_json(const nlohmann::json& j) {
  PolicySet set = defaults();
  if (j.is_null()) return set;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "policies");
  for (const auto& [name, body] : j.items()) {
    auto agent = parse_agent_id(name);
    if (!agent) throw Error(ErrorCode::InvalidConfig, "policies." + name);
    if (!body.is_object()) throw Error(ErrorCode::InvalidConfig, "policies." + name);
    GuardrailPolicy p = *set.find(*agent);
    for (const auto& [key, value] : body.items()) {
      const std::string where = "policies." + name + "." + key;
      if (key == "allowed_actions") {
        p.allowed_actions = string_set(value, where);
      } else if (key == "data_scopes") {
        p.data_scopes = string_set(value, where);
      } else if (key == "max_auto_band") {
        auto band = value.is_string() ? monitor::parse_risk_band(value.get<std::string>()) : std::nullopt;
        if (!band) throw Error(ErrorCode::InvalidConfig, where);
        p.max_auto_band = *band;
      } else {
        throw Error(ErrorCode::InvalidConfig, where);
      }
    }
    set.set(std::move(p));
  }
  set.validate();
  return set;
}

nlohmann::json PolicySet::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [agent, p] : policies_) {
    out[std::string(fcc::to_string(agent))] = {
        {"allowed_actions", p.allowed_actions},
        {"max_auto_band", monitor::to_string(p.max_auto_band)},
        {"data_scopes", p.data_scopes},
    };
  }
  return out;
}

void PolicySet::validate() const {
  for (const auto& [agent, p] : policies_) {
    for (const auto& a : p.allowed_actions) {
      if (is_human_reserved(a)) {
        throw Error(ErrorCode::InvalidConfig,
                    "policies." + std::string(fcc::to_string(agent)) + " may not allow " + a);
      }
    }
  }
}

const GuardrailPolicy* PolicySet::find(AgentId agent) const {
  auto it = policies_.find(agent);
  return it == policies_.end() ? nullptr : &it->second;
}

void PolicySet::set(GuardrailPolicy p) {
  const AgentId agent = p.agent;
  policies_.insert_or_assign(agent, std::move(p));
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Allow: return "ALLOW";
    case Verdict::Block: return "BLOCK";
    case Verdict::RequireHandover: return "REQUIRE_HANDOVER";
  }
  return "UNKNOWN";
}

std::string GuardrailDecision::to_string() const {
  switch (verdict) {
    case Verdict::Allow: return "ALLOW";
    case Verdict::Block: return "BLOCK(" + reason + ")";
    case Verdict::RequireHandover: return "REQUIRE_HANDOVER(" + target + ")";
  }
  return "UNKNOWN";
}

std::optional<std::string> required_scope(std::string_view action_name) {
  if (action_name == action::kReadCase) return "cases";
  return std::nullopt;
}

GuardrailDecision enforce_guardrail(AgentId agent, std::string_view action_name,
                                    std::optional<monitor::RiskBand> case_band, const PolicySet& policies) {
  const GuardrailPolicy* p = policies.find(agent);
  if (p == nullptr) throw Error(ErrorCode::UnknownAgent, std::string(fcc::to_string(agent)));
  const std::string name(action_name);
  const std::string who(fcc::to_string(agent));

  if (is_human_reserved(action_name)) {
    return {Verdict::RequireHandover, name + " is reserved for a human decision", "HUMAN"};
  }
  if (!p->allowed_actions.contains(name)) {
    return {Verdict::Block, name + " is not permitted for " + who, ""};
  }
  if (auto scope = required_scope(action_name); scope && !p->data_scopes.contains(*scope)) {
    return {Verdict::Block, who + " has no access to " + *scope, ""};
  }
  if (case_band && *case_band > p->max_auto_band) {
    return {Verdict::RequireHandover,
            "case band " + std::string(monitor::to_string(*case_band)) + " exceeds " +
                std::string(monitor::to_string(p->max_auto_band)) + " for " + who,
            "HUMAN"};
  }
  return {Verdict::Allow, name + " permitted for " + who, ""};
}

}  // namespace fcc::orchestrate
