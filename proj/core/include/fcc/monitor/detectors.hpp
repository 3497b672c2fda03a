#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcc/ingest/trade_event.hpp"
#include "fcc/monitor/alert.hpp"
#include "fcc/monitor/ruleset.hpp"
#include "fcc/screening/screening.hpp"

// Typology detectors. Each is a pure function of the history it is given.
// Histories are time-ordered and end with the trade being evaluated; only
// the suffix inside the detector's look-back window ending at that trade
// is considered. Returned alerts carry no alert_id; the monitor assigns it.
namespace fcc::monitor {

std::optional<Alert> detect_new_wallet(const screening::WalletProfile& wallet, const ingest::TradeEvent& trade,
                                       const RulesetConfig& cfg);

/// `pair_history` holds trades between the two parties of its last trade.
/// Fires one alert per wallet (two in total) or none.
std::vector<Alert> detect_wash_trading(std::span<const ingest::TradeEvent> pair_history, const RulesetConfig& cfg);

std::optional<Alert> detect_structuring(const std::string& wallet, std::span<const ingest::TradeEvent> history,
                                        const RulesetConfig& cfg);

std::optional<Alert> detect_velocity(const std::string& wallet, std::span<const ingest::TradeEvent> history,
                                     const RulesetConfig& cfg);

/// `item_history` is the custody chain of one item. The alert subject is
/// the buyer of the last trade.
std::optional<Alert> detect_obfuscation(std::span<const ingest::TradeEvent> item_history, const RulesetConfig& cfg);

std::optional<Alert> detect_sanctions(const screening::WalletProfile& wallet, const ingest::TradeEvent& trade,
                                      const screening::ScreeningResult& screening, const RulesetConfig& cfg);

std::optional<Alert> detect_jurisdiction(const screening::WalletProfile& wallet, const ingest::TradeEvent& trade,
                                         const screening::ScreeningResult& screening, const RulesetConfig& cfg);

/// Number of consecutive trade pairs whose direction differs.
int count_alternations(std::span<const ingest::TradeEvent> pair_trades);

/// Exact test of population-stddev / mean <= max_cv over trade values.
bool price_cv_within(std::span<const ingest::TradeEvent> trades, Decimal max_cv);

/// Score is the capped sum of base scores over distinct alert types; the
/// subject is that of the earliest-raised alert.
RiskAggregate aggregate_case_risk(std::span<const Alert> alerts, const RulesetConfig& cfg);

}  // namespace fcc::monitor
