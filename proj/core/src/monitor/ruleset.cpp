#include "fcc/monitor/ruleset.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "fcc/common/error.hpp"

namespace fcc::monitor {
namespace {

using json = nlohmann::json;

Decimal read_decimal(const json& v, const char* key) {
  std::optional<Decimal> d;
  if (v.is_string()) d = Decimal::parse(v.get_ref<const std::string&>());
  else if (v.is_number_integer()) d = Decimal::from_int(v.get<std::int64_t>());
  else if (v.is_number_float()) d = Decimal::from_double(v.get<double>());
  if (!d) throw Error(ErrorCode::InvalidConfig, key);
  return *d;
}

int read_int(const json& v, const char* key) {
  if (!v.is_number_integer()) throw Error(ErrorCode::InvalidConfig, key);
  return v.get<int>();
}

}  // namespace

int RulesetConfig::base_score(AlertType type) const {
  auto it = base_scores.find(type);
  return it == base_scores.end() ? 0 : it->second;
}

bool RulesetConfig::in_structuring_band(Decimal value) const {
  using wide = boost::multiprecision::int128_t;
  const wide v = static_cast<wide>(value.micros()) * Decimal::kScale;
  const wide lo = static_cast<wide>(structuring_band_low.micros()) * kyc_threshold_usd.micros();
  const wide hi = static_cast<wide>(structuring_band_high.micros()) * kyc_threshold_usd.micros();
  return v >= lo && v < hi;
}

void RulesetConfig::validate() const {
  for (AlertType t : kAllAlertTypes) {
    auto it = base_scores.find(t);
    if (it == base_scores.end() || it->second < 0 || it->second > 100) {
      throw Error(ErrorCode::InvalidConfig, "base_scores." + std::string(to_string(t)));
    }
  }
  if (new_wallet_age_days <= 0) throw Error(ErrorCode::InvalidConfig, "new_wallet_age_days");
  if (wash_window_days <= 0) throw Error(ErrorCode::InvalidConfig, "wash_window_days");
  if (wash_min_alternations <= 0) throw Error(ErrorCode::InvalidConfig, "wash_min_alternations");
  if (wash_max_price_cv.is_negative()) throw Error(ErrorCode::InvalidConfig, "wash_max_price_cv");
  if (kyc_threshold_usd <= Decimal{}) throw Error(ErrorCode::InvalidConfig, "kyc_threshold_usd");
  if (structuring_band_low <= Decimal{} || structuring_band_low >= Decimal::from_int(1) ||
      structuring_band_high <= structuring_band_low || structuring_band_high > Decimal::from_int(1)) {
    throw Error(ErrorCode::InvalidConfig, "structuring_band");
  }
  if (structuring_min_count <= 0) throw Error(ErrorCode::InvalidConfig, "structuring_min_count");
  if (velocity_max_trades_24h <= 0) throw Error(ErrorCode::InvalidConfig, "velocity_max_trades_24h");
  if (obfuscation_min_hops <= 0) throw Error(ErrorCode::InvalidConfig, "obfuscation_min_hops");
}

RulesetConfig RulesetConfig::from_json(const json& j) {
  RulesetConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "ruleset");
  for (const auto& [key, value] : j.items()) {
    if (key == "base_scores") {
      if (!value.is_object()) throw Error(ErrorCode::InvalidConfig, "base_scores");
      for (const auto& [type_name, score] : value.items()) {
        auto type = parse_alert_type(type_name);
        if (!type) throw Error(ErrorCode::InvalidConfig, "base_scores." + type_name);
        cfg.base_scores[*type] = read_int(score, "base_scores");
      }
    } else if (key == "new_wallet_age_days") {
      cfg.new_wallet_age_days = read_int(value, "new_wallet_age_days");
    } else if (key == "wash_window_days") {
      cfg.wash_window_days = read_int(value, "wash_window_days");
    } else if (key == "wash_min_alternations") {
      cfg.wash_min_alternations = read_int(value, "wash_min_alternations");
    } else if (key == "wash_max_price_cv") {
      cfg.wash_max_price_cv = read_decimal(value, "wash_max_price_cv");
    } else if (key == "kyc_threshold_usd") {
      cfg.kyc_threshold_usd = read_decimal(value, "kyc_threshold_usd");
    } else if (key == "structuring_band") {
      if (!value.is_array() || value.size() != 2) throw Error(ErrorCode::InvalidConfig, "structuring_band");
      cfg.structuring_band_low = read_decimal(value[0], "structuring_band");
      cfg.structuring_band_high = read_decimal(value[1], "structuring_band");
    } else if (key == "structuring_min_count") {
      cfg.structuring_min_count = read_int(value, "structuring_min_count");
    } else if (key == "velocity_max_trades_24h") {
      cfg.velocity_max_trades_24h = read_int(value, "velocity_max_trades_24h");
    } else if (key == "obfuscation_min_hops") {
      cfg.obfuscation_min_hops = read_int(value, "obfuscation_min_hops");
    } else {
      throw Error(ErrorCode::InvalidConfig, "ruleset." + key);
    }
  }
  cfg.validate();
  return cfg;
}

json RulesetConfig::to_json() const {
  json scores = json::object();
  for (const auto& [type, score] : base_scores) scores[std::string(to_string(type))] = score;
  return json{
      {"base_scores", scores},
      {"new_wallet_age_days", new_wallet_age_days},
      {"wash_window_days", wash_window_days},
      {"wash_min_alternations", wash_min_alternations},
      {"wash_max_price_cv", wash_max_price_cv.to_string()},
      {"kyc_threshold_usd", kyc_threshold_usd.to_string()},
      {"structuring_band", json::array({structuring_band_low.to_string(), structuring_band_high.to_string()})},
      {"structuring_min_count", structuring_min_count},
      {"velocity_max_trades_24h", velocity_max_trades_24h},
      {"obfuscation_min_hops", obfuscation_min_hops},
  };
}

}  // namespace fcc::monitor
