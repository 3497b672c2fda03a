#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fcc/ingest/trade_event.hpp"
#include "fcc/monitor/alert.hpp"
#include "fcc/monitor/ruleset.hpp"
#include "fcc/screening/screening.hpp"

namespace fcc::monitor {

/// Result of evaluating one trade against the current monitoring state.
/// Nothing is applied until Monitor::commit.
struct TradeEvaluation {
  std::vector<Alert> alerts;                       // deduplicated, type then subject order, ids assigned
  std::vector<screening::WalletProfile> profiles;  // parties after the trade; one entry for a self-trade
};

/// Monitoring state: wallet profiles, windowed trade indexes and the
/// last emitted window per (type, subject) used for duplicate suppression.
/// Single writer.
class Monitor {
 public:
  explicit Monitor(RulesetConfig cfg = {}, screening::ScreeningLists lists = {});

  /// Registers a wallet known before the stream starts.
  void seed_wallet(const screening::RegistryEntry& entry);

  /// Pure: evaluates `trade` as if it had been appended.
  TradeEvaluation evaluate_trade(const ingest::TradeEvent& trade) const;
  /// Applies an evaluation produced by evaluate_trade for the same trade.
  void commit(const ingest::TradeEvent& trade, TradeEvaluation evaluation);
  /// evaluate_trade followed by commit.
  std::vector<Alert> process(const ingest::TradeEvent& trade);

  /// True once the wallet has appeared in a committed trade.
  bool has_traded(const std::string& wallet) const { return traded_.contains(wallet); }
  const screening::WalletProfile* profile(const std::string& wallet) const;
  screening::ScreeningResult screen(const std::string& wallet) const;

  const std::vector<Alert>& alerts() const { return alerts_; }
  const Alert* find_alert(const std::string& alert_id) const;
  const std::vector<ingest::TradeEvent>& trades() const { return trades_; }
  /// Index into trades() of a committed transaction.
  std::optional<std::size_t> trade_index(const std::string& tx_id) const;
  /// Indexes into trades() involving `wallet`, in stream order.
  std::span<const std::size_t> wallet_trades(const std::string& wallet) const;
  const RulesetConfig& config() const { return cfg_; }
  const screening::ScreeningLists& lists() const { return lists_; }

 private:
  std::vector<ingest::TradeEvent> window_of(const std::vector<std::size_t>* index, seconds width,
                                            const ingest::TradeEvent& trade) const;
  screening::WalletProfile provisional_profile(const std::string& wallet, const ingest::TradeEvent& trade) const;

  RulesetConfig cfg_;
  screening::ScreeningLists lists_;
  std::unordered_map<std::string, screening::WalletProfile> profiles_;
  std::unordered_set<std::string> traded_;
  std::vector<ingest::TradeEvent> trades_;
  std::unordered_map<std::string, std::size_t> by_tx_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_wallet_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_pair_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_item_;
  std::map<std::pair<AlertType, std::string>, Window> last_window_;
  std::vector<Alert> alerts_;
  std::unordered_map<std::string, std::size_t> alert_index_;
};

std::string pair_key(const std::string& a, const std::string& b);
std::string item_key(const ingest::TradeEvent& trade);
std::string format_alert_id(std::size_t ordinal);

}  // namespace fcc::monitor
