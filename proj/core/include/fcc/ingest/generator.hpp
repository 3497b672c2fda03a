#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/ingest/trade_event.hpp"
#include "fcc/monitor/alert.hpp"

namespace fcc::ingest {

/// Synthetic stream parameters. Benign trades draw log-normal prices;
/// suspicious mass is planted as rings of the typologies in `pattern_mix`.
struct GeneratorConfig {
  std::uint64_t seed = 42;
  std::size_t n_wallets = 20'000;
  std::size_t n_collections = 859;
  std::size_t n_transactions = 100'000;
  double target_suspicious_fraction = 0.045;
  std::map<monitor::AlertType, double> pattern_mix{
      {monitor::AlertType::WashTrading, 0.40},
      {monitor::AlertType::Structuring, 0.25},
      {monitor::AlertType::HighVelocity, 0.15},
      {monitor::AlertType::Obfuscation, 0.20},
  };
  double price_log_mean = 5.5;
  double price_log_sigma = 1.0;
  std::size_t time_span_days = 365;
  Timestamp start = std::chrono::sys_days{std::chrono::year{2025} / 1 / 1};

  /// Throws Error(InvalidConfig) when an invariant does not hold.
  void validate() const;

  static GeneratorConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SyntheticStream {
  std::vector<TradeEvent> events;
  std::vector<GroundTruthLabel> labels;  // one per event, same order
};

/// Typologies the generator can plant.
bool is_plantable(monitor::AlertType type);

/// Deterministic in `config`. Throws Error(InfeasibleConfig) when the
/// planted rings cannot fit the transaction or wallet budget.
SyntheticStream generate_synthetic(const GeneratorConfig& config);

}  // namespace fcc::ingest
