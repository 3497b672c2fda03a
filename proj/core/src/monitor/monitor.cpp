#include "fcc/monitor/monitor.hpp"

#include <algorithm>
#include <cstdio>

#include "fcc/monitor/detectors.hpp"

namespace fcc::monitor {

using ingest::TradeEvent;
using screening::WalletProfile;

std::string pair_key(const std::string& a, const std::string& b) {
  return a < b ? a + "|" + b : b + "|" + a;
}

std::string item_key(const TradeEvent& trade) { return trade.collection_id + "\x1f" + trade.item_id; }

std::string format_alert_id(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ALT-%06zu", ordinal);
  return buf;
}

Monitor::Monitor(RulesetConfig cfg, screening::ScreeningLists lists)
    : cfg_(std::move(cfg)), lists_(std::move(lists)) {
  cfg_.validate();
}

void Monitor::seed_wallet(const screening::RegistryEntry& entry) {
  auto [it, inserted] = profiles_.try_emplace(entry.address, screening::fresh_profile(entry.address, entry.first_seen));
  if (!inserted) it->second.first_seen = std::min(it->second.first_seen, entry.first_seen);
  if (entry.jurisdiction) it->second.jurisdiction = entry.jurisdiction;
  it->second.customer_risk = screen(entry.address).customer_risk;
}

const WalletProfile* Monitor::profile(const std::string& wallet) const {
  auto it = profiles_.find(wallet);
  return it == profiles_.end() ? nullptr : &it->second;
}

screening::ScreeningResult Monitor::screen(const std::string& wallet) const {
  return screening::screen_wallet(wallet, profile(wallet), lists_);
}

const Alert* Monitor::find_alert(const std::string& alert_id) const {
  auto it = alert_index_.find(alert_id);
  return it == alert_index_.end() ? nullptr : &alerts_[it->second];
}

std::optional<std::size_t> Monitor::trade_index(const std::string& tx_id) const {
  auto it = by_tx_.find(tx_id);
  if (it == by_tx_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> Monitor::wallet_trades(const std::string& wallet) const {
  auto it = by_wallet_.find(wallet);
  if (it == by_wallet_.end()) return {};
  return it->second;
}

std::vector<TradeEvent> Monitor::window_of(const std::vector<std::size_t>* index, seconds width,
                                           const TradeEvent& trade) const {
  std::vector<TradeEvent> out;
  if (index != nullptr) {
    const Timestamp from = trade.timestamp - width;
    auto it = index->end();
    while (it != index->begin() && trades_[*(it - 1)].timestamp >= from) --it;
    for (; it != index->end(); ++it) out.push_back(trades_[*it]);
  }
  out.push_back(trade);
  return out;
}

WalletProfile Monitor::provisional_profile(const std::string& wallet, const TradeEvent& trade) const {
  const WalletProfile* existing = profile(wallet);
  WalletProfile p = existing != nullptr ? *existing : screening::fresh_profile(wallet, trade.timestamp);
  p = screening::update_wallet_profile(std::move(p), trade);
  p.customer_risk = screening::screen_wallet(wallet, &p, lists_).customer_risk;
  return p;
}

TradeEvaluation Monitor::evaluate_trade(const TradeEvent& trade) const {
  TradeEvaluation out;
  std::vector<Alert> raw;
  auto push = [&raw](std::optional<Alert> a) {
    if (a) raw.push_back(std::move(*a));
  };
  auto lookup = [](const auto& map, const std::string& key) -> const std::vector<std::size_t>* {
    auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };

  const std::vector<std::string> parties =
      trade.is_self_trade() ? std::vector<std::string>{trade.seller} : std::vector<std::string>{trade.seller, trade.buyer};
  const seconds wash_window = days(cfg_.wash_window_days);
  for (const std::string& wallet : parties) {
    WalletProfile p = provisional_profile(wallet, trade);
    const auto screening = screening::screen_wallet(wallet, &p, lists_);
    push(detect_new_wallet(p, trade, cfg_));
    const auto history = window_of(lookup(by_wallet_, wallet), wash_window, trade);
    push(detect_structuring(wallet, history, cfg_));
    push(detect_velocity(wallet, history, cfg_));
    push(detect_sanctions(p, trade, screening, cfg_));
    push(detect_jurisdiction(p, trade, screening, cfg_));
    out.profiles.push_back(std::move(p));
  }
  if (!trade.is_self_trade()) {
    const auto pair = window_of(lookup(by_pair_, pair_key(trade.seller, trade.buyer)), wash_window, trade);
    for (Alert& a : detect_wash_trading(pair, cfg_)) raw.push_back(std::move(a));
  }
  push(detect_obfuscation(window_of(lookup(by_item_, item_key(trade)), wash_window, trade), cfg_));

  std::stable_sort(raw.begin(), raw.end(), [](const Alert& a, const Alert& b) {
    return std::tie(a.type, a.subject) < std::tie(b.type, b.subject);
  });
  std::map<std::pair<AlertType, std::string>, Window> emitted;
  std::size_t ordinal = alerts_.size();
  for (Alert& a : raw) {
    const auto key = std::make_pair(a.type, a.subject);
    const Window* previous = nullptr;
    if (auto it = emitted.find(key); it != emitted.end()) previous = &it->second;
    else if (auto jt = last_window_.find(key); jt != last_window_.end()) previous = &jt->second;
    if (previous != nullptr && previous->overlaps(*a.window)) continue;
    emitted[key] = *a.window;
    a.alert_id = format_alert_id(++ordinal);
    out.alerts.push_back(std::move(a));
  }
  return out;
}

void Monitor::commit(const TradeEvent& trade, TradeEvaluation evaluation) {
  const std::size_t index = trades_.size();
  trades_.push_back(trade);
  by_tx_.emplace(trade.tx_id, index);
  by_wallet_[trade.seller].push_back(index);
  if (!trade.is_self_trade()) {
    by_wallet_[trade.buyer].push_back(index);
    by_pair_[pair_key(trade.seller, trade.buyer)].push_back(index);
  }
  by_item_[item_key(trade)].push_back(index);
  traded_.insert(trade.seller);
  traded_.insert(trade.buyer);
  for (WalletProfile& p : evaluation.profiles) profiles_[p.address] = std::move(p);
  for (Alert& a : evaluation.alerts) {
    last_window_[{a.type, a.subject}] = *a.window;
    alert_index_.emplace(a.alert_id, alerts_.size());
    alerts_.push_back(std::move(a));
  }
}

std::vector<Alert> Monitor::process(const TradeEvent& trade) {
  TradeEvaluation evaluation = evaluate_trade(trade);
  std::vector<Alert> alerts = evaluation.alerts;
  commit(trade, std::move(evaluation));
  return alerts;
}

}  // namespace fcc::monitor
