#pragma once

#include <optional>
#include <string>

#include "fcc/investigate/case_context.hpp"
#include "fcc/investigate/optimizer.hpp"
#include "fcc/investigate/semantic_cache.hpp"

namespace fcc::investigate {

/// Alert types that escalate regardless of the threshold.
bool is_mandatory_escalation(monitor::AlertType type);

/// Fresh disposition. Depends only on the key, the case score (itself a
/// function of the key's alert types), theta and whether a guardrail
/// demands human review; the rationale is rendered from those facts only,
/// so cached and fresh results for one key agree.
Disposition decide(const SemanticKey& key, int score, int theta, bool human_required);

/// Outcome of an investigation before any cache mutation.
struct InvestigationPlan {
  SemanticKey key;
  Disposition disposition;
  bool cache_hit = false;
  std::optional<CacheEntry> entry;  // fresh entry to write when not a hit
};

/// Pure: consults `cache` without touching it.
InvestigationPlan plan_investigation(const CaseContext& context, const OptimizerState& optimizer,
                                     const SemanticCache& cache, const ExclusionCheck& excluded,
                                     const std::string& model_profile_id, Timestamp at,
                                     const monitor::RulesetConfig& cfg, bool human_required = false);

/// Plans, then counts the hit or inserts the fresh entry.
Disposition investigate(const CaseContext& context, const OptimizerState& optimizer, SemanticCache& cache,
                        const ExclusionCheck& excluded, const std::string& model_profile_id, Timestamp at,
                        const monitor::RulesetConfig& cfg, bool human_required = false);

}  // namespace fcc::investigate
