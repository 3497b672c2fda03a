#include "fcc/investigate/semantic_cache.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

#include "fcc/common/error.hpp"

namespace fcc::investigate {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const nlohmann::json& j, const Enum (&values)[N], const char* field) {
  if (j.is_string()) {
    for (Enum v : values) {
      if (to_string(v) == j.get_ref<const std::string&>()) return v;
    }
  }
  throw Error(ErrorCode::MalformedValue, field);
}

constexpr TradeCountBucket kCountBuckets[] = {TradeCountBucket::One, TradeCountBucket::TwoToFive,
                                              TradeCountBucket::SixToTwenty, TradeCountBucket::OverTwenty};
constexpr ValueBucket kValueBuckets[] = {ValueBucket::BelowBand, ValueBucket::InBand,
                                         ValueBucket::AtOrAboveThreshold};
constexpr AgeBucket kAgeBuckets[] = {AgeBucket::UnderWeek, AgeBucket::WeekToQuarter, AgeBucket::OverQuarter};
constexpr Outcome kOutcomes[] = {Outcome::AutoClose, Outcome::Escalate};
constexpr Provenance kProvenances[] = {Provenance::Fresh, Provenance::Cache};

}  // namespace

std::string_view to_string(TradeCountBucket b) {
  switch (b) {
    case TradeCountBucket::One: return "1";
    case TradeCountBucket::TwoToFive: return "2-5";
    case TradeCountBucket::SixToTwenty: return "6-20";
    case TradeCountBucket::OverTwenty: return ">20";
  }
  return "?";
}

std::string_view to_string(ValueBucket b) {
  switch (b) {
    case ValueBucket::BelowBand: return "<0.5T";
    case ValueBucket::InBand: return "0.5T-T";
    case ValueBucket::AtOrAboveThreshold: return ">=T";
  }
  return "?";
}

std::string_view to_string(AgeBucket b) {
  switch (b) {
    case AgeBucket::UnderWeek: return "<7d";
    case AgeBucket::WeekToQuarter: return "7-90d";
    case AgeBucket::OverQuarter: return ">90d";
  }
  return "?";
}

std::string_view to_string(Outcome o) { return o == Outcome::Escalate ? "ESCALATE" : "AUTO_CLOSE"; }
std::string_view to_string(Provenance p) { return p == Provenance::Cache ? "CACHE" : "FRESH"; }

TradeCountBucket bucket_trade_count(std::size_t count) {
  if (count <= 1) return TradeCountBucket::One;
  if (count <= 5) return TradeCountBucket::TwoToFive;
  if (count <= 20) return TradeCountBucket::SixToTwenty;
  return TradeCountBucket::OverTwenty;
}

ValueBucket bucket_value(Decimal value_max, const monitor::RulesetConfig& cfg) {
  if (value_max >= cfg.kyc_threshold_usd) return ValueBucket::AtOrAboveThreshold;
  if (cfg.in_structuring_band(value_max)) return ValueBucket::InBand;
  return ValueBucket::BelowBand;
}

AgeBucket bucket_age(long long days) {
  if (days < 7) return AgeBucket::UnderWeek;
  if (days <= 90) return AgeBucket::WeekToQuarter;
  return AgeBucket::OverQuarter;
}

std::string SemanticKey::to_string() const {
  std::string types;
  for (auto t : alert_types) {
    if (!types.empty()) types += ',';
    types += monitor::to_string(t);
  }
  std::string out = types;
  for (std::string_view part : {monitor::to_string(band), investigate::to_string(trade_count),
                                investigate::to_string(value), investigate::to_string(wallet_age)}) {
    out += '|';
    out += part;
  }
  return out;
}

nlohmann::json SemanticKey::to_json() const {
  nlohmann::json types = nlohmann::json::array();
  for (auto t : alert_types) types.push_back(monitor::to_string(t));
  return {
      {"alert_types", types},
      {"band", monitor::to_string(band)},
      {"trade_count_bucket", investigate::to_string(trade_count)},
      {"value_bucket", investigate::to_string(value)},
      {"wallet_age_bucket", investigate::to_string(wallet_age)},
  };
}

SemanticKey SemanticKey::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedValue, "key");
  SemanticKey k;
  std::set<monitor::AlertType> types;
  for (const auto& t : j.at("alert_types")) {
    auto type = t.is_string() ? monitor::parse_alert_type(t.get<std::string>()) : std::nullopt;
    if (!type) throw Error(ErrorCode::MalformedValue, "alert_types");
    types.insert(*type);
  }
  k.alert_types.assign(types.begin(), types.end());
  auto band = monitor::parse_risk_band(j.at("band").get<std::string>());
  if (!band) throw Error(ErrorCode::MalformedValue, "band");
  k.band = *band;
  k.trade_count = parse_enum(j.at("trade_count_bucket"), kCountBuckets, "trade_count_bucket");
  k.value = parse_enum(j.at("value_bucket"), kValueBuckets, "value_bucket");
  k.wallet_age = parse_enum(j.at("wallet_age_bucket"), kAgeBuckets, "wallet_age_bucket");
  return k;
}

SemanticKey semantic_key(const CaseContext& context, const monitor::RulesetConfig& cfg) {
  std::set<monitor::AlertType> types;
  for (const auto& a : context.alerts) types.insert(a.type);
  SemanticKey k;
  k.alert_types.assign(types.begin(), types.end());
  k.band = context.risk.band;
  k.trade_count = bucket_trade_count(context.behavior.trade_count_30d);
  k.value = bucket_value(context.behavior.value_max, cfg);
  k.wallet_age = bucket_age(context.behavior.wallet_age_days);
  return k;
}

nlohmann::json Disposition::to_json() const {
  return {
      {"outcome", investigate::to_string(outcome)},
      {"str_recommended", str_recommended},
      {"rationale", rationale},
      {"provenance", investigate::to_string(provenance)},
  };
}

Disposition Disposition::from_json(const nlohmann::json& j) {
  Disposition d;
  d.outcome = parse_enum(j.at("outcome"), kOutcomes, "outcome");
  d.str_recommended = j.at("str_recommended").get<bool>();
  d.rationale = j.at("rationale").get<std::string>();
  d.provenance = parse_enum(j.at("provenance"), kProvenances, "provenance");
  return d;
}

nlohmann::json CacheEntry::to_json() const {
  return {
      {"key", key.to_json()},
      {"disposition", disposition.to_json()},
      {"model_profile_id", model_profile_id},
      {"created_at", format_rfc3339(created_at)},
      {"hit_count", hit_count},
  };
}

std::optional<CacheEntry> SemanticCache::lookup(const SemanticKey& key, const ExclusionCheck& excluded) {
  auto it = entries_.find(key.to_string());
  if (it == entries_.end()) return std::nullopt;
  if (excluded && excluded(it->second.model_profile_id)) return std::nullopt;
  ++it->second.hit_count;
  return it->second;
}

const CacheEntry* SemanticCache::peek(const SemanticKey& key) const {
  auto it = entries_.find(key.to_string());
  return it == entries_.end() ? nullptr : &it->second;
}

void SemanticCache::insert(CacheEntry entry) {
  std::string k = entry.key.to_string();
  entries_.insert_or_assign(std::move(k), std::move(entry));
}

std::size_t SemanticCache::erase_model(const std::string& model_profile_id) {
  return std::erase_if(entries_, [&](const auto& kv) { return kv.second.model_profile_id == model_profile_id; });
}

std::size_t SemanticCache::clear() {
  const std::size_t n = entries_.size();
  entries_.clear();
  return n;
}

nlohmann::json SemanticCache::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [k, entry] : entries_) out.push_back(entry.to_json());
  return out;
}

}  // namespace fcc::investigate
