#include "fcc/investigate/case_context.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "fcc/common/error.hpp"
#include "fcc/common/hex.hpp"
#include "fcc/monitor/detectors.hpp"

namespace fcc::investigate {
namespace {

using ingest::TradeEvent;
using monitor::Alert;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

bool connected(std::span<const Alert> alerts) {
  DisjointSets sets(alerts.size());
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    auto link = [&](const std::string& key) {
      auto [it, inserted] = owner.emplace(key, i);
      if (!inserted) sets.unite(it->second, i);
    };
    link(alerts[i].subject);
    for (const auto& ref : alerts[i].tx_refs) link(ref);
  }
  for (std::size_t i = 1; i < alerts.size(); ++i) {
    if (sets.find(i) != sets.find(0)) return false;
  }
  return true;
}

BehaviorSummary summarize(const std::string& focus, Timestamp t_ref, const monitor::Monitor& state) {
  BehaviorSummary b;
  b.focus_wallet = focus;
  b.window_end = t_ref;
  b.window_start = t_ref - days(state.config().wash_window_days);

  std::map<std::string, std::vector<const TradeEvent*>> by_counterparty;
  bool any = false;
  for (std::size_t index : state.wallet_trades(focus)) {
    const TradeEvent& e = state.trades()[index];
    if (e.timestamp < b.window_start || e.timestamp > t_ref) continue;
    ++b.trade_count_30d;
    if (!any || e.value_usd < b.value_min) b.value_min = e.value_usd;
    if (!any || e.value_usd > b.value_max) b.value_max = e.value_usd;
    any = true;
    if (!e.is_self_trade()) by_counterparty[e.seller == focus ? e.buyer : e.seller].push_back(&e);
  }
  for (const auto& [counterparty, trades] : by_counterparty) {
    int flips = 0;
    for (std::size_t i = 1; i < trades.size(); ++i) {
      if (trades[i]->seller != trades[i - 1]->seller) ++flips;
    }
    if (flips > b.alternation_count) {
      b.alternation_count = flips;
      b.counterparty = counterparty;
    }
  }

  const auto* profile = state.profile(focus);
  const Timestamp first_seen = profile != nullptr ? profile->first_seen : t_ref;
  b.wallet_age_days = std::max(0LL, whole_days_between(first_seen, t_ref));
  return b;
}

std::string role_in(const std::string& wallet, const std::vector<const TradeEvent*>& trades) {
  bool sells = false;
  bool buys = false;
  for (const TradeEvent* e : trades) {
    sells = sells || e->seller == wallet;
    buys = buys || e->buyer == wallet;
  }
  if (sells && buys) return "buyer and seller";
  return sells ? "seller" : "buyer";
}

}  // namespace

CaseContext build_case_context(const std::string& case_id, std::span<const Alert> alerts,
                               const monitor::Monitor& state) {
  if (alerts.empty()) throw Error(ErrorCode::DisjointAlerts, "no alerts");
  if (!connected(alerts)) throw Error(ErrorCode::DisjointAlerts, "alerts share no wallet or transaction");

  CaseContext ctx;
  ctx.case_id = case_id;
  ctx.alerts.assign(alerts.begin(), alerts.end());

  const Alert* earliest = &alerts.front();
  for (const Alert& a : alerts) {
    if (a.raised_at < earliest->raised_at) earliest = &a;
  }
  ctx.flagged_tx = earliest->trigger_tx;

  std::set<std::size_t> indexes;
  auto add_tx = [&](const std::string& tx) {
    auto index = state.trade_index(tx);
    if (!index) throw Error(ErrorCode::NotFound, "transaction " + tx);
    indexes.insert(*index);
  };
  add_tx(ctx.flagged_tx);
  for (const Alert& a : alerts) {
    for (const auto& ref : a.tx_refs) add_tx(ref);
  }
  std::vector<const TradeEvent*> case_trades;
  for (std::size_t index : indexes) {
    case_trades.push_back(&state.trades()[index]);
    ctx.tx_refs.push_back(state.trades()[index].tx_id);
  }

  const TradeEvent& flagged = state.trades()[*state.trade_index(ctx.flagged_tx)];
  if (flagged.is_self_trade()) {
    ctx.subjects.push_back({flagged.seller, "buyer and seller"});
  } else {
    ctx.subjects.push_back({flagged.seller, "seller"});
    ctx.subjects.push_back({flagged.buyer, "buyer"});
  }
  std::set<std::string> others;
  for (const Alert& a : alerts) {
    if (is_wallet_address(a.subject) && !flagged.involves(a.subject)) others.insert(a.subject);
  }
  for (const auto& wallet : others) ctx.subjects.push_back({wallet, role_in(wallet, case_trades)});

  ctx.risk = monitor::aggregate_case_risk(alerts, state.config());
  for (const auto& subject : ctx.subjects) ctx.screening.push_back(state.screen(subject.address));

  const std::string focus = is_wallet_address(earliest->subject) ? earliest->subject : flagged.buyer;
  ctx.behavior = summarize(focus, case_trades.back()->timestamp, state);
  return ctx;
}

nlohmann::json to_json(const BehaviorSummary& b) {
  return {
      {"focus_wallet", b.focus_wallet},
      {"counterparty", b.counterparty},
      {"trade_count_30d", b.trade_count_30d},
      {"value_min", b.value_min.to_string()},
      {"value_max", b.value_max.to_string()},
      {"alternation_count", b.alternation_count},
      {"wallet_age_days", b.wallet_age_days},
      {"window_start", format_rfc3339(b.window_start)},
      {"window_end", format_rfc3339(b.window_end)},
  };
}

nlohmann::json to_json(const CaseContext& ctx) {
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : ctx.subjects) subjects.push_back({{"address", s.address}, {"role", s.role}});
  nlohmann::json alerts = nlohmann::json::array();
  for (const auto& a : ctx.alerts) alerts.push_back(monitor::to_json(a));
  nlohmann::json screening = nlohmann::json::array();
  for (const auto& s : ctx.screening) screening.push_back(screening::to_json(s));
  return {
      {"case_id", ctx.case_id},
      {"flagged_tx", ctx.flagged_tx},
      {"subjects", subjects},
      {"tx_refs", ctx.tx_refs},
      {"alerts", alerts},
      {"risk", monitor::to_json(ctx.risk)},
      {"screening", screening},
      {"behavior_summary", to_json(ctx.behavior)},
  };
}

}  // namespace fcc::investigate
