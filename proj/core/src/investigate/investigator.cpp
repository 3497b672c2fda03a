#include "fcc/investigate/investigator.hpp"

#include <algorithm>

namespace fcc::investigate {

using monitor::AlertType;
using monitor::RiskBand;

bool is_mandatory_escalation(AlertType type) { return type == AlertType::SanctionsHit; }

Disposition decide(const SemanticKey& key, int score, int theta, bool human_required) {
  const bool mandatory = std::any_of(key.alert_types.begin(), key.alert_types.end(), is_mandatory_escalation);
  const bool over = score >= theta;

  Disposition d;
  d.provenance = Provenance::Fresh;
  d.outcome = over || mandatory || human_required ? Outcome::Escalate : Outcome::AutoClose;
  d.str_recommended = d.outcome == Outcome::Escalate && key.band >= RiskBand::ModerateHigh;

  std::string types;
  for (std::size_t i = 0; i < key.alert_types.size(); ++i) {
    if (i > 0) types += i + 1 == key.alert_types.size() ? " and " : ", ";
    types += monitor::display_name(key.alert_types[i]);
  }
  std::string r = "Risk score " + std::to_string(score) + " (" + std::string(monitor::to_string(key.band)) +
                  ") from " + types + (key.alert_types.size() == 1 ? " alert" : " alerts") + " is " +
                  (over ? "at or above" : "below") + " the escalation threshold " + std::to_string(theta) + ".";
  if (mandatory) r += " A Sanctions Hit alert requires escalation regardless of the threshold.";
  if (human_required) r += " Band " + std::string(monitor::to_string(key.band)) + " requires human review.";
  r += " Behaviour: " + std::string(to_string(key.trade_count)) + " trades in the look-back window, maximum value " +
       std::string(to_string(key.value)) + ", wallet age " + std::string(to_string(key.wallet_age)) + ".";
  if (d.outcome == Outcome::Escalate) {
    r += d.str_recommended ? " Decision: escalate and draft an STR."
                           : " Decision: escalate for review; band is below MODERATE_HIGH so no STR is drafted.";
  } else {
    r += " Decision: auto-close.";
  }
  d.rationale = std::move(r);
  return d;
}

InvestigationPlan plan_investigation(const CaseContext& context, const OptimizerState& optimizer,
                                     const SemanticCache& cache, const ExclusionCheck& excluded,
                                     const std::string& model_profile_id, Timestamp at,
                                     const monitor::RulesetConfig& cfg, bool human_required) {
  InvestigationPlan plan;
  plan.key = semantic_key(context, cfg);
  if (const CacheEntry* hit = cache.peek(plan.key);
      hit != nullptr && !(excluded && excluded(hit->model_profile_id))) {
    plan.cache_hit = true;
    plan.disposition = hit->disposition;
    plan.disposition.provenance = Provenance::Cache;
    return plan;
  }
  plan.disposition = decide(plan.key, context.risk.score, optimizer.theta, human_required);
  plan.entry = CacheEntry{plan.key, plan.disposition, model_profile_id, at, 0};
  return plan;
}

Disposition investigate(const CaseContext& context, const OptimizerState& optimizer, SemanticCache& cache,
                        const ExclusionCheck& excluded, const std::string& model_profile_id, Timestamp at,
                        const monitor::RulesetConfig& cfg, bool human_required) {
  InvestigationPlan plan =
      plan_investigation(context, optimizer, cache, excluded, model_profile_id, at, cfg, human_required);
  if (plan.cache_hit) cache.lookup(plan.key, excluded);
  else cache.insert(std::move(*plan.entry));
  return plan.disposition;
}

}  // namespace fcc::investigate
