#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/investigate/case_context.hpp"
#include "fcc/monitor/ruleset.hpp"

namespace fcc::investigate {

enum class TradeCountBucket { One, TwoToFive, SixToTwenty, OverTwenty };
enum class ValueBucket { BelowBand, InBand, AtOrAboveThreshold };
enum class AgeBucket { UnderWeek, WeekToQuarter, OverQuarter };

std::string_view to_string(TradeCountBucket b);
std::string_view to_string(ValueBucket b);
std::string_view to_string(AgeBucket b);

/// Bucketed case fingerprint. Exact-match only.
struct SemanticKey {
  std::vector<monitor::AlertType> alert_types;  // sorted, distinct
  monitor::RiskBand band = monitor::RiskBand::Low;
  TradeCountBucket trade_count = TradeCountBucket::One;
  ValueBucket value = ValueBucket::BelowBand;
  AgeBucket wallet_age = AgeBucket::OverQuarter;

  /// Canonical text form, also the cache map key.
  std::string to_string() const;
  nlohmann::json to_json() const;
  static SemanticKey from_json(const nlohmann::json& j);

  friend auto operator<=>(const SemanticKey&, const SemanticKey&) = default;
  friend bool operator==(const SemanticKey&, const SemanticKey&) = default;
};

TradeCountBucket bucket_trade_count(std::size_t count);
ValueBucket bucket_value(Decimal value_max, const monitor::RulesetConfig& cfg);
AgeBucket bucket_age(long long days);

SemanticKey semantic_key(const CaseContext& context, const monitor::RulesetConfig& cfg);

enum class Outcome { AutoClose, Escalate };
enum class Provenance { Fresh, Cache };

std::string_view to_string(Outcome o);
std::string_view to_string(Provenance p);

struct Disposition {
  Outcome outcome = Outcome::AutoClose;
  bool str_recommended = false;
  std::string rationale;
  Provenance provenance = Provenance::Fresh;

  nlohmann::json to_json() const;
  static Disposition from_json(const nlohmann::json& j);
  /// Equal ignoring provenance.
  bool same_decision(const Disposition& other) const {
    return outcome == other.outcome && str_recommended == other.str_recommended && rationale == other.rationale;
  }
  friend bool operator==(const Disposition&, const Disposition&) = default;
};

struct CacheEntry {
  SemanticKey key;
  Disposition disposition;
  std::string model_profile_id;
  Timestamp created_at{};
  std::size_t hit_count = 0;

  nlohmann::json to_json() const;
  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

/// Returns true for model profiles whose entries must stay invisible.
using ExclusionCheck = std::function<bool(const std::string& model_profile_id)>;

class SemanticCache {
 public:
  /// Exact key match whose model profile is not excluded; bumps hit_count.
  std::optional<CacheEntry> lookup(const SemanticKey& key, const ExclusionCheck& excluded);
  /// Read-only variant used for previews; does not count a hit.
  const CacheEntry* peek(const SemanticKey& key) const;
  void insert(CacheEntry entry);
  /// Drops every entry produced by `model_profile_id`; returns how many.
  std::size_t erase_model(const std::string& model_profile_id);
  std::size_t clear();

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, CacheEntry>& entries() const { return entries_; }
  nlohmann::json to_json() const;

 private:
  std::map<std::string, CacheEntry> entries_;
};

}  // namespace fcc::investigate
