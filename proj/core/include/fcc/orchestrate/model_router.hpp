#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/decimal.hpp"

namespace fcc::orchestrate {

enum class ModelKind { Rules, ExternalLlm, Predictive };
enum class TaskType { Triage, Investigate, DraftNarrative };

std::string_view to_string(ModelKind k);
std::string_view to_string(TaskType t);
std::optional<ModelKind> parse_model_kind(std::string_view text);
std::optional<TaskType> parse_task_type(std::string_view text);

struct ModelProfile {
  std::string profile_id;
  ModelKind kind = ModelKind::Rules;
  int explainability = 5;  // 1-5
  Decimal cost_per_call_usd;
  int latency_ms_p50 = 0;
  Decimal compliance_score = Decimal::from_int(1);  // 0-1
  bool excluded = false;
  std::set<std::string> jurisdictions;  // empty means any

  nlohmann::json to_json() const;
  static ModelProfile from_json(const nlohmann::json& j);
  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

struct TaskDescriptor {
  TaskType task_type = TaskType::Investigate;
  int min_explainability = 1;
  std::optional<std::string> jurisdiction;
  Decimal max_cost_usd = Decimal::from_int(1);
  int max_latency_ms = 60'000;

  nlohmann::json to_json() const;
};

inline constexpr std::string_view kRulesFallbackId = "rules-v1";

/// Model profiles keyed by id, always including the RULES fallback.
class ModelRegistry {
 public:
  ModelRegistry();
  /// Adds the fallback when `profiles` lacks a RULES profile. Throws
  /// Error(InvalidConfig) on duplicate ids or more than one RULES profile.
  explicit ModelRegistry(std::vector<ModelProfile> profiles, Decimal baseline = Decimal::from_micros(800'000));

  const ModelProfile& fallback() const;
  const ModelProfile* find(const std::string& id) const;
  bool is_excluded(const std::string& id) const;
  Decimal baseline() const { return baseline_; }
  const std::map<std::string, ModelProfile>& profiles() const { return profiles_; }

  /// Replaces the stored profile (same id must exist).
  void put(const ModelProfile& profile);
  nlohmann::json to_json() const;

 private:
  std::map<std::string, ModelProfile> profiles_;
  std::string fallback_id_;
  Decimal baseline_;
};

/// Non-excluded candidates meeting every task constraint, ordered by
/// explainability (desc), cost (asc), id (asc); the RULES fallback when
/// nothing qualifies.
const ModelProfile& route_model(const TaskDescriptor& task, const ModelRegistry& registry);

/// EMA update with weight 0.2 on the new outcome (pass = 1, fail = 0),
/// rounded to the nearest millionth. Throws Error(UnknownProfile) or
/// Error(FallbackImmutable). Does not modify the registry.
ModelProfile update_model_score(const std::string& profile_id, bool pass, const ModelRegistry& registry);

}  // namespace fcc::orchestrate
