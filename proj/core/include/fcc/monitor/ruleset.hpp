#pragma once

#include <map>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/decimal.hpp"
#include "fcc/monitor/alert.hpp"

namespace fcc::monitor {

/// Monitoring thresholds. Every field can be overridden by key from the
/// `ruleset` section of the configuration file.
struct RulesetConfig {
  std::map<AlertType, int> base_scores{
      {AlertType::NewWallet, 10},    {AlertType::WashTrading, 40},  {AlertType::Structuring, 20},
      {AlertType::HighVelocity, 15}, {AlertType::Obfuscation, 35},  {AlertType::SanctionsHit, 100},
      {AlertType::HighRiskJurisdiction, 30},
  };
  int new_wallet_age_days = 7;
  int wash_window_days = 30;
  int wash_min_alternations = 3;
  Decimal wash_max_price_cv = Decimal::from_micros(100'000);  // 0.10
  Decimal kyc_threshold_usd = Decimal::from_int(100);
  Decimal structuring_band_low = Decimal::from_micros(500'000);  // fraction of threshold, inclusive
  Decimal structuring_band_high = Decimal::from_int(1);          // fraction of threshold, exclusive
  int structuring_min_count = 3;
  int velocity_max_trades_24h = 20;
  int obfuscation_min_hops = 4;

  int base_score(AlertType type) const;
  /// True when `value` lies in [low * T, high * T).
  bool in_structuring_band(Decimal value) const;
  /// Throws Error(InvalidConfig) naming the first bad key.
  void validate() const;

  static RulesetConfig from_json(const nlohmann::json& overrides);
  nlohmann::json to_json() const;
};

}  // namespace fcc::monitor
