#include "fcc/orchestrate/model_router.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "fcc/common/error.hpp"

namespace fcc::orchestrate {
namespace {

Decimal read_decimal(const nlohmann::json& v, const std::string& where) {
  std::optional<Decimal> d;
  if (v.is_string()) d = Decimal::parse(v.get_ref<const std::string&>());
  else if (v.is_number_integer()) d = Decimal::from_int(v.get<std::int64_t>());
  else if (v.is_number_float()) d = Decimal::from_double(v.get<double>());
  if (!d) throw Error(ErrorCode::InvalidConfig, where);
  return *d;
}

ModelProfile rules_fallback() {
  ModelProfile p;
  p.profile_id = std::string(kRulesFallbackId);
  p.kind = ModelKind::Rules;
  p.explainability = 5;
  return p;
}

}  // namespace

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Rules: return "RULES";
    case ModelKind::ExternalLlm: return "EXTERNAL_LLM";
    case ModelKind::Predictive: return "PREDICTIVE";
  }
  return "UNKNOWN";
}

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::Triage: return "TRIAGE";
    case TaskType::Investigate: return "INVESTIGATE";
    case TaskType::DraftNarrative: return "DRAFT_NARRATIVE";
  }
  return "UNKNOWN";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::Rules, ModelKind::ExternalLlm, ModelKind::Predictive}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<TaskType> parse_task_type(std::string_view text) {
  for (auto t : {TaskType::Triage, TaskType::Investigate, TaskType::DraftNarrative}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

nlohmann::json ModelProfile::to_json() const {
  return {
      {"profile_id", profile_id},
      {"kind", to_string(kind)},
      {"explainability", explainability},
      {"cost_per_call_usd", cost_per_call_usd.to_string()},
      {"latency_ms_p50", latency_ms_p50},
      {"compliance_score", compliance_score.to_string()},
      {"excluded", excluded},
      {"jurisdictions", jurisdictions},
  };
}

ModelProfile ModelProfile::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "models[]");
  ModelProfile p;
  p.profile_id = j.value("profile_id", "");
  if (p.profile_id.empty()) throw Error(ErrorCode::InvalidConfig, "models[].profile_id");
  const std::string where = "models." + p.profile_id;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "profile_id") continue;
      if (key == "kind") {
        auto kind = parse_model_kind(value.get<std::string>());
        if (!kind) throw Error(ErrorCode::InvalidConfig, where + ".kind");
        p.kind = *kind;
      } else if (key == "explainability") {
        p.explainability = value.get<int>();
      } else if (key == "cost_per_call_usd") {
        p.cost_per_call_usd = read_decimal(value, where + ".cost_per_call_usd");
      } else if (key == "latency_ms_p50") {
        p.latency_ms_p50 = value.get<int>();
      } else if (key == "compliance_score") {
        p.compliance_score = read_decimal(value, where + ".compliance_score");
      } else if (key == "jurisdictions") {
        p.jurisdictions = value.get<std::set<std::string>>();
      } else if (key == "excluded") {
        continue;  // derived from compliance_score
      } else {
        throw Error(ErrorCode::InvalidConfig, where + "." + key);
      }
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::InvalidConfig, where + "." + key);
    }
  }
  if (p.explainability < 1 || p.explainability > 5) throw Error(ErrorCode::InvalidConfig, where + ".explainability");
  if (p.compliance_score.is_negative() || p.compliance_score > Decimal::from_int(1)) {
    throw Error(ErrorCode::InvalidConfig, where + ".compliance_score");
  }
  if (p.cost_per_call_usd.is_negative()) throw Error(ErrorCode::InvalidConfig, where + ".cost_per_call_usd");
  return p;
}

nlohmann::json TaskDescriptor::to_json() const {
  return {
      {"task_type", to_string(task_type)},
      {"min_explainability", min_explainability},
      {"jurisdiction", jurisdiction ? nlohmann::json(*jurisdiction) : nlohmann::json()},
      {"max_cost_usd", max_cost_usd.to_string()},
      {"max_latency_ms", max_latency_ms},
  };
}

ModelRegistry::ModelRegistry() : ModelRegistry(std::vector<ModelProfile>{}) {}

ModelRegistry::ModelRegistry(std::vector<ModelProfile> profiles, Decimal baseline) : baseline_(baseline) {
  for (auto& p : profiles) {
    if (p.kind == ModelKind::Rules) {
      if (!fallback_id_.empty()) throw Error(ErrorCode::InvalidConfig, "models: more than one RULES profile");
      fallback_id_ = p.profile_id;
      p.excluded = false;
    } else {
      p.excluded = p.compliance_score < baseline_;
    }
    const std::string id = p.profile_id;
    if (!profiles_.emplace(id, std::move(p)).second) throw Error(ErrorCode::InvalidConfig, "models: duplicate " + id);
  }
  if (fallback_id_.empty()) {
    ModelProfile fb = rules_fallback();
    if (profiles_.contains(fb.profile_id)) throw Error(ErrorCode::InvalidConfig, "models: duplicate " + fb.profile_id);
    fallback_id_ = fb.profile_id;
    profiles_.emplace(fb.profile_id, fb);
  }
}

const ModelProfile& ModelRegistry::fallback() const { return profiles_.at(fallback_id_); }

const ModelProfile* ModelRegistry::find(const std::string& id) const {
  auto it = profiles_.find(id);
  return it == profiles_.end() ? nullptr : &it->second;
}

bool ModelRegistry::is_excluded(const std::string& id) const {
  const ModelProfile* p = find(id);
  return p != nullptr && p->excluded;
}

void ModelRegistry::put(const ModelProfile& profile) {
  auto it = profiles_.find(profile.profile_id);
  if (it == profiles_.end()) throw Error(ErrorCode::UnknownProfile, profile.profile_id);
  it->second = profile;
}

nlohmann::json ModelRegistry::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [id, p] : profiles_) out.push_back(p.to_json());
  return out;
}

const ModelProfile& route_model(const TaskDescriptor& task, const ModelRegistry& registry) {
  std::vector<const ModelProfile*> candidates;
  for (const auto& [id, p] : registry.profiles()) {
    if (p.excluded) continue;
    if (p.explainability < task.min_explainability) continue;
    if (p.cost_per_call_usd > task.max_cost_usd) continue;
    if (p.latency_ms_p50 > task.max_latency_ms) continue;
    if (task.jurisdiction && !p.jurisdictions.empty() && !p.jurisdictions.contains(*task.jurisdiction)) continue;
    candidates.push_back(&p);
  }
  if (candidates.empty()) return registry.fallback();
  return **std::min_element(candidates.begin(), candidates.end(), [](const ModelProfile* a, const ModelProfile* b) {
    if (a->explainability != b->explainability) return a->explainability > b->explainability;
    if (a->cost_per_call_usd != b->cost_per_call_usd) return a->cost_per_call_usd < b->cost_per_call_usd;
    return a->profile_id < b->profile_id;
  });
}

ModelProfile update_model_score(const std::string& profile_id, bool pass, const ModelRegistry& registry) {
  const ModelProfile* existing = registry.find(profile_id);
  if (existing == nullptr) throw Error(ErrorCode::UnknownProfile, profile_id);
  if (existing->kind == ModelKind::Rules) throw Error(ErrorCode::FallbackImmutable, profile_id);
  ModelProfile p = *existing;
  // 0.8 * s + 0.2 * outcome, computed in tenths of a micro and rounded half up.
  const std::int64_t tenths = 8 * p.compliance_score.micros() + (pass ? 2 * Decimal::kScale : 0);
  p.compliance_score = Decimal::from_micros((tenths + 5) / 10);
  p.excluded = p.compliance_score < registry.baseline();
  return p;
}

}  // namespace fcc::orchestrate
