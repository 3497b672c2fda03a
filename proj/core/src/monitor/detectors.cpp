#include "fcc/monitor/detectors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <set>

namespace fcc::monitor {
namespace {

using ingest::TradeEvent;

std::span<const TradeEvent> in_window(std::span<const TradeEvent> history, seconds width) {
  if (history.empty()) return history;
  const Timestamp from = history.back().timestamp - width;
  auto first = std::lower_bound(history.begin(), history.end(), from,
                                [](const TradeEvent& e, Timestamp t) { return e.timestamp < t; });
  return history.subspan(static_cast<std::size_t>(first - history.begin()));
}

std::vector<std::string> tx_ids(std::span<const TradeEvent> trades) {
  std::vector<std::string> out;
  out.reserve(trades.size());
  for (const auto& e : trades) out.push_back(e.tx_id);
  return out;
}

std::string money(Decimal d) { return "$" + d.to_string(); }

std::string span_text(Timestamp from, Timestamp to) {
  return format_rfc3339(from) + " to " + format_rfc3339(to);
}

Alert make(AlertType type, std::string subject, std::vector<std::string> refs, std::string evidence, Window window,
           const TradeEvent& trigger, const RulesetConfig& cfg) {
  Alert a;
  a.type = type;
  a.subject = std::move(subject);
  a.tx_refs = std::move(refs);
  a.score = cfg.base_score(type);
  a.evidence = std::move(evidence);
  a.window = window;
  a.raised_at = trigger.timestamp;
  a.trigger_tx = trigger.tx_id;
  return a;
}

Decimal band_floor(const RulesetConfig& cfg) {
  using boost::multiprecision::int128_t;
  const int128_t micros =
      int128_t(cfg.kyc_threshold_usd.micros()) * cfg.structuring_band_low.micros() / Decimal::kScale;
  return Decimal::from_micros(static_cast<std::int64_t>(micros));
}

}  // namespace

std::optional<Alert> detect_new_wallet(const screening::WalletProfile& wallet, const TradeEvent& trade,
                                       const RulesetConfig& cfg) {
  const seconds age = trade.timestamp - wallet.first_seen;
  if (age >= days(cfg.new_wallet_age_days)) return std::nullopt;
  const long long age_days = whole_days_between(wallet.first_seen, trade.timestamp);
  return make(AlertType::NewWallet, wallet.address, {trade.tx_id},
              "wallet first seen " + format_rfc3339(wallet.first_seen) + ", " + std::to_string(age_days) +
                  " days before this trade (limit " + std::to_string(cfg.new_wallet_age_days) + " days)",
              Window{wallet.first_seen, trade.timestamp}, trade, cfg);
}

int count_alternations(std::span<const TradeEvent> pair_trades) {
  int flips = 0;
  for (std::size_t i = 1; i < pair_trades.size(); ++i) {
    if (pair_trades[i].seller != pair_trades[i - 1].seller) ++flips;
  }
  return flips;
}

bool price_cv_within(std::span<const TradeEvent> trades, Decimal max_cv) {
  using boost::multiprecision::int256_t;
  if (trades.empty()) return false;
  // sd/mean <= c  <=>  n*sum(v^2) - sum(v)^2 <= c^2 * sum(v)^2, in micro units.
  int256_t sum = 0;
  int256_t sum_sq = 0;
  for (const auto& e : trades) {
    const int256_t v = e.value_usd.micros();
    sum += v;
    sum_sq += v * v;
  }
  const int256_t n = static_cast<long long>(trades.size());
  const int256_t scale = Decimal::kScale;
  const int256_t c = max_cv.micros();
  return (n * sum_sq - sum * sum) * scale * scale <= c * c * sum * sum;
}

std::vector<Alert> detect_wash_trading(std::span<const TradeEvent> pair_history, const RulesetConfig& cfg) {
  if (pair_history.empty()) return {};
  const TradeEvent& last = pair_history.back();
  if (last.is_self_trade()) return {};

  std::vector<TradeEvent> pair;
  for (const auto& e : in_window(pair_history, days(cfg.wash_window_days))) {
    if ((e.seller == last.seller && e.buyer == last.buyer) || (e.seller == last.buyer && e.buyer == last.seller)) {
      pair.push_back(e);
    }
  }
  const int flips = count_alternations(pair);
  if (flips < cfg.wash_min_alternations) return {};
  if (!price_cv_within(pair, cfg.wash_max_price_cv)) return {};

  const auto [lo, hi] = std::minmax_element(pair.begin(), pair.end(), [](const TradeEvent& a, const TradeEvent& b) {
    return a.value_usd < b.value_usd;
  });
  const Window window{pair.front().timestamp, last.timestamp};
  const std::string evidence = std::to_string(pair.size()) + " back-and-forth trades between " + last.seller +
                               " and " + last.buyer + " from " + span_text(window.start, window.end) + ", " +
                               std::to_string(flips) + " direction alternations, values " + money(lo->value_usd) +
                               " to " + money(hi->value_usd);
  std::vector<std::string> refs = tx_ids(pair);
  std::vector<Alert> out;
  for (const std::string* wallet : {&last.seller, &last.buyer}) {
    out.push_back(make(AlertType::WashTrading, *wallet, refs, evidence, window, last, cfg));
  }
  return out;
}

std::optional<Alert> detect_structuring(const std::string& wallet, std::span<const TradeEvent> history,
                                        const RulesetConfig& cfg) {
  if (history.empty()) return std::nullopt;
  std::vector<TradeEvent> banded;
  for (const auto& e : in_window(history, days(cfg.wash_window_days))) {
    if (e.involves(wallet) && cfg.in_structuring_band(e.value_usd)) banded.push_back(e);
  }
  if (static_cast<int>(banded.size()) < cfg.structuring_min_count) return std::nullopt;
  const TradeEvent& last = history.back();
  const Window window{banded.front().timestamp, last.timestamp};
  return make(AlertType::Structuring, wallet, tx_ids(banded),
              std::to_string(banded.size()) + " trades valued between " +
                  money(band_floor(cfg)) +
                  " and the " + money(cfg.kyc_threshold_usd) + " KYC threshold from " +
                  span_text(window.start, window.end),
              window, last, cfg);
}

std::optional<Alert> detect_velocity(const std::string& wallet, std::span<const TradeEvent> history,
                                     const RulesetConfig& cfg) {
  if (history.empty()) return std::nullopt;
  std::vector<TradeEvent> recent;
  for (const auto& e : in_window(history, seconds{86'400})) {
    if (e.involves(wallet)) recent.push_back(e);
  }
  if (static_cast<int>(recent.size()) <= cfg.velocity_max_trades_24h) return std::nullopt;
  const TradeEvent& last = history.back();
  const Window window{recent.front().timestamp, last.timestamp};
  return make(AlertType::HighVelocity, wallet, tx_ids(recent),
              std::to_string(recent.size()) + " trades within 24 hours (limit " +
                  std::to_string(cfg.velocity_max_trades_24h) + ") from " + span_text(window.start, window.end),
              window, last, cfg);
}

std::optional<Alert> detect_obfuscation(std::span<const TradeEvent> item_history, const RulesetConfig& cfg) {
  if (item_history.empty()) return std::nullopt;
  const TradeEvent& last = item_history.back();
  std::vector<TradeEvent> chain;
  std::set<std::string> custodians;
  for (const auto& e : in_window(item_history, days(cfg.wash_window_days))) {
    if (e.collection_id != last.collection_id || e.item_id != last.item_id) continue;
    chain.push_back(e);
    custodians.insert(e.seller);
    custodians.insert(e.buyer);
  }
  if (static_cast<int>(custodians.size()) < cfg.obfuscation_min_hops) return std::nullopt;
  const Window window{chain.front().timestamp, last.timestamp};
  return make(AlertType::Obfuscation, last.buyer, tx_ids(chain),
              "item " + last.item_id + " passed through " + std::to_string(custodians.size()) +
                  " distinct wallets in " + std::to_string(chain.size()) + " trades from " +
                  span_text(window.start, window.end),
              window, last, cfg);
}

std::optional<Alert> detect_sanctions(const screening::WalletProfile& wallet, const TradeEvent& trade,
                                      const screening::ScreeningResult& screening, const RulesetConfig& cfg) {
  if (!screening.sanctions_hit) return std::nullopt;
  return make(AlertType::SanctionsHit, wallet.address, {trade.tx_id}, "wallet is on the sanctions list",
              Window{wallet.first_seen, trade.timestamp}, trade, cfg);
}

std::optional<Alert> detect_jurisdiction(const screening::WalletProfile& wallet, const TradeEvent& trade,
                                         const screening::ScreeningResult& screening, const RulesetConfig& cfg) {
  if (!screening.high_risk_jurisdiction) return std::nullopt;
  return make(AlertType::HighRiskJurisdiction, wallet.address, {trade.tx_id},
              "wallet jurisdiction " + wallet.jurisdiction.value_or("?") + " is on the high-risk list",
              Window{wallet.first_seen, trade.timestamp}, trade, cfg);
}

RiskAggregate aggregate_case_risk(std::span<const Alert> alerts, const RulesetConfig& cfg) {
  RiskAggregate agg;
  std::set<AlertType> types;
  const Alert* earliest = nullptr;
  for (const Alert& a : alerts) {
    types.insert(a.type);
    agg.contributing_alerts.push_back(a.alert_id);
    if (earliest == nullptr || a.raised_at < earliest->raised_at) earliest = &a;
  }
  int total = 0;
  for (AlertType t : types) total += cfg.base_score(t);
  agg.score = std::min(100, total);
  agg.band = risk_band(agg.score);
  if (earliest != nullptr) agg.subject = earliest->subject;
  return agg;
}

}  // namespace fcc::monitor
