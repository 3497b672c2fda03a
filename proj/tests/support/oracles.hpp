#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They recompute each quantity straight from its definition over the
// full stream prefix, with exact rational arithmetic, and share no code with
// the library beyond its data types.

#include <boost/multiprecision/cpp_int.hpp>
#include <openssl/sha.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fcc/audit/audit_log.hpp"
#include "fcc/investigate/optimizer.hpp"
#include "fcc/monitor/alert.hpp"
#include "fcc/monitor/ruleset.hpp"
#include "fcc/ingest/trade_event.hpp"
#include "fcc/screening/screening.hpp"

namespace oracle {

using boost::multiprecision::cpp_rational;
using fcc::Decimal;
using fcc::Timestamp;
using fcc::ingest::TradeEvent;
using fcc::monitor::AlertType;

inline cpp_rational rat(Decimal d) { return cpp_rational(d.micros(), Decimal::kScale); }

inline Timestamp at(long long offset_seconds) {
  return Timestamp{std::chrono::seconds{1'735'689'600 + offset_seconds}};  // 2025-01-01T00:00:00Z
}

// ---- random streams -------------------------------------------------------

struct StreamSpec {
  std::vector<TradeEvent> events;
  std::vector<fcc::screening::RegistryEntry> registry;
  fcc::screening::ScreeningLists lists;
  fcc::monitor::RulesetConfig cfg;
};

inline std::string wallet_name(int i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "0x%040x", 0xa11ce0 + i);
  return buf;
}

inline fcc::monitor::RulesetConfig random_config(std::mt19937_64& rng) {
  fcc::monitor::RulesetConfig cfg;
  if (rng() % 2 == 0) return cfg;
  std::uniform_int_distribution<int> small(1, 5);
  cfg.new_wallet_age_days = small(rng);
  cfg.wash_window_days = 3 + static_cast<int>(rng() % 28);
  cfg.wash_min_alternations = small(rng);
  cfg.wash_max_price_cv = Decimal::from_micros(static_cast<std::int64_t>(rng() % 200'000));
  cfg.structuring_min_count = small(rng);
  cfg.velocity_max_trades_24h = small(rng);
  cfg.obfuscation_min_hops = 2 + static_cast<int>(rng() % 4);
  return cfg;
}

/// At most `max_len` trades among a handful of wallets and items, with
/// time gaps from zero seconds to weeks so every look-back window matters.
inline StreamSpec random_stream(std::mt19937_64& rng, std::size_t max_len = 50) {
  StreamSpec s;
  s.cfg = random_config(rng);
  const int n_wallets = 2 + static_cast<int>(rng() % 6);
  const int n_items = 1 + static_cast<int>(rng() % 5);
  const std::size_t n = 1 + rng() % max_len;

  for (int w = 0; w < n_wallets; ++w) {
    const std::string addr = wallet_name(w);
    if (rng() % 4 == 0) s.lists.sanctions.insert(addr);
    if (rng() % 3 == 0) {
      fcc::screening::RegistryEntry e{addr, at(-static_cast<long long>(rng() % (40 * 86'400))), std::nullopt};
      if (rng() % 2 == 0) e.jurisdiction = rng() % 2 == 0 ? "KP" : "DE";
      s.registry.push_back(e);
    }
  }
  s.lists.high_risk_jurisdictions.insert("KP");

  long long t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    switch (rng() % 5) {
      case 0: break;
      case 1: t += static_cast<long long>(rng() % 3600); break;
      case 2: t += static_cast<long long>(rng() % 86'400); break;
      case 3: t += static_cast<long long>(rng() % (4 * 86'400)); break;
      default: t += static_cast<long long>(rng() % (20 * 86'400)); break;
    }
    TradeEvent e;
    e.tx_id = "0x" + std::to_string(1000 + i);
    e.collection_id = "c" + std::to_string(rng() % 2);
    e.item_id = "i" + std::to_string(rng() % n_items);
    e.seller = wallet_name(static_cast<int>(rng() % n_wallets));
    e.buyer = rng() % 20 == 0 ? e.seller : wallet_name(static_cast<int>(rng() % n_wallets));
    std::int64_t cents = 0;
    switch (rng() % 3) {
      case 0: cents = 5500 + static_cast<std::int64_t>(rng() % 1500); break;
      case 1: cents = 4000 + static_cast<std::int64_t>(rng() % 8000); break;
      default: cents = 20000 + static_cast<std::int64_t>(rng() % 20000); break;
    }
    e.value_usd = Decimal::from_micros(cents * 10'000);
    e.timestamp = at(t);
    s.events.push_back(e);
  }
  return s;
}

// ---- detector oracles -----------------------------------------------------

/// What an alert asserts, independent of ids and evidence wording.
struct Expected {
  AlertType type;
  std::string subject;
  std::vector<std::string> tx_refs;
  Timestamp start;
  Timestamp end;
  int score;

  friend bool operator==(const Expected&, const Expected&) = default;
  friend auto operator<=>(const Expected& a, const Expected& b) {
    return std::tie(a.type, a.subject) <=> std::tie(b.type, b.subject);
  }
};

inline Expected expected_of(const fcc::monitor::Alert& a) {
  return {a.type, a.subject, a.tx_refs, a.window ? a.window->start : Timestamp{},
          a.window ? a.window->end : Timestamp{}, a.score};
}

inline bool involves(const TradeEvent& e, const std::string& w) { return e.seller == w || e.buyer == w; }

/// Trades of prefix[0..t] satisfying `pred` with timestamp >= ts(t) - width.
template <typename Pred>
std::vector<const TradeEvent*> windowed(const std::vector<TradeEvent>& stream, std::size_t t, long long width_s,
                                        Pred pred) {
  std::vector<const TradeEvent*> out;
  const Timestamp from = stream[t].timestamp - std::chrono::seconds{width_s};
  for (std::size_t i = 0; i <= t; ++i) {
    if (stream[i].timestamp >= from && pred(stream[i])) out.push_back(&stream[i]);
  }
  return out;
}

inline std::vector<std::string> ids(const std::vector<const TradeEvent*>& v) {
  std::vector<std::string> out;
  for (const auto* e : v) out.push_back(e->tx_id);
  return out;
}

inline Timestamp first_seen(const StreamSpec& s, std::size_t t, const std::string& w) {
  std::optional<Timestamp> best;
  for (const auto& r : s.registry) {
    if (r.address == w && (!best || r.first_seen < *best)) best = r.first_seen;
  }
  for (std::size_t i = 0; i <= t; ++i) {
    if (involves(s.events[i], w) && (!best || s.events[i].timestamp < *best)) best = s.events[i].timestamp;
  }
  return *best;
}

inline std::optional<std::string> jurisdiction(const StreamSpec& s, const std::string& w) {
  std::optional<std::string> j;
  for (const auto& r : s.registry) {
    if (r.address == w && r.jurisdiction) j = r.jurisdiction;
  }
  return j;
}

inline std::optional<Expected> new_wallet(const StreamSpec& s, std::size_t t, const std::string& w) {
  const auto& e = s.events[t];
  const Timestamp fs = first_seen(s, t, w);
  if (e.timestamp - fs >= std::chrono::seconds{86'400LL * s.cfg.new_wallet_age_days}) return std::nullopt;
  return Expected{AlertType::NewWallet, w, {e.tx_id}, fs, e.timestamp, s.cfg.base_score(AlertType::NewWallet)};
}

/// Population CV <= c, i.e. var <= c^2 * mean^2, in exact rationals.
inline bool cv_ok(const std::vector<const TradeEvent*>& v, Decimal c) {
  if (v.empty()) return false;
  cpp_rational sum = 0, sum_sq = 0;
  for (const auto* e : v) {
    sum += rat(e->value_usd);
    sum_sq += rat(e->value_usd) * rat(e->value_usd);
  }
  const cpp_rational n = static_cast<long long>(v.size());
  const cpp_rational mean = sum / n;
  const cpp_rational var = sum_sq / n - mean * mean;
  return var <= rat(c) * rat(c) * mean * mean;
}

inline std::vector<Expected> wash(const StreamSpec& s, std::size_t t) {
  const auto& last = s.events[t];
  if (last.seller == last.buyer) return {};
  const std::set<std::string> pair{last.seller, last.buyer};
  auto trades = windowed(s.events, t, 86'400LL * s.cfg.wash_window_days, [&](const TradeEvent& e) {
    return std::set<std::string>{e.seller, e.buyer} == pair;
  });
  int flips = 0;
  for (std::size_t i = 1; i < trades.size(); ++i) flips += trades[i]->seller != trades[i - 1]->seller ? 1 : 0;
  if (flips < s.cfg.wash_min_alternations || !cv_ok(trades, s.cfg.wash_max_price_cv)) return {};
  std::vector<Expected> out;
  for (const auto& w : {last.seller, last.buyer}) {
    out.push_back({AlertType::WashTrading, w, ids(trades), trades.front()->timestamp, last.timestamp,
                   s.cfg.base_score(AlertType::WashTrading)});
  }
  return out;
}

inline std::optional<Expected> structuring(const StreamSpec& s, std::size_t t, const std::string& w) {
  const cpp_rational lo = rat(s.cfg.structuring_band_low) * rat(s.cfg.kyc_threshold_usd);
  const cpp_rational hi = rat(s.cfg.structuring_band_high) * rat(s.cfg.kyc_threshold_usd);
  auto banded = windowed(s.events, t, 86'400LL * s.cfg.wash_window_days, [&](const TradeEvent& e) {
    return involves(e, w) && rat(e.value_usd) >= lo && rat(e.value_usd) < hi;
  });
  if (static_cast<int>(banded.size()) < s.cfg.structuring_min_count) return std::nullopt;
  return Expected{AlertType::Structuring, w, ids(banded), banded.front()->timestamp, s.events[t].timestamp,
                  s.cfg.base_score(AlertType::Structuring)};
}

inline std::optional<Expected> velocity(const StreamSpec& s, std::size_t t, const std::string& w) {
  auto recent = windowed(s.events, t, 86'400, [&](const TradeEvent& e) { return involves(e, w); });
  if (static_cast<int>(recent.size()) <= s.cfg.velocity_max_trades_24h) return std::nullopt;
  return Expected{AlertType::HighVelocity, w, ids(recent), recent.front()->timestamp, s.events[t].timestamp,
                  s.cfg.base_score(AlertType::HighVelocity)};
}

inline std::optional<Expected> obfuscation(const StreamSpec& s, std::size_t t) {
  const auto& last = s.events[t];
  auto chain = windowed(s.events, t, 86'400LL * s.cfg.wash_window_days, [&](const TradeEvent& e) {
    return e.collection_id == last.collection_id && e.item_id == last.item_id;
  });
  std::set<std::string> custody;
  for (const auto* e : chain) {
    custody.insert(e->seller);
    custody.insert(e->buyer);
  }
  if (static_cast<int>(custody.size()) < s.cfg.obfuscation_min_hops) return std::nullopt;
  return Expected{AlertType::Obfuscation, last.buyer, ids(chain), chain.front()->timestamp, last.timestamp,
                  s.cfg.base_score(AlertType::Obfuscation)};
}

inline std::optional<Expected> sanctions(const StreamSpec& s, std::size_t t, const std::string& w) {
  if (!s.lists.sanctions.contains(w)) return std::nullopt;
  return Expected{AlertType::SanctionsHit, w, {s.events[t].tx_id}, first_seen(s, t, w), s.events[t].timestamp,
                  s.cfg.base_score(AlertType::SanctionsHit)};
}

inline std::optional<Expected> high_risk_jurisdiction(const StreamSpec& s, std::size_t t, const std::string& w) {
  const auto j = jurisdiction(s, w);
  if (!j || !s.lists.high_risk_jurisdictions.contains(*j)) return std::nullopt;
  return Expected{AlertType::HighRiskJurisdiction, w, {s.events[t].tx_id}, first_seen(s, t, w),
                  s.events[t].timestamp, s.cfg.base_score(AlertType::HighRiskJurisdiction)};
}

/// Every alert a trade raises before duplicate suppression.
inline std::vector<Expected> raw_alerts(const StreamSpec& s, std::size_t t) {
  std::vector<Expected> out;
  const auto& e = s.events[t];
  std::vector<std::string> parties{e.seller};
  if (e.buyer != e.seller) parties.push_back(e.buyer);
  auto add = [&out](std::optional<Expected> x) {
    if (x) out.push_back(std::move(*x));
  };
  for (const auto& w : parties) {
    add(new_wallet(s, t, w));
    add(structuring(s, t, w));
    add(velocity(s, t, w));
    add(sanctions(s, t, w));
    add(high_risk_jurisdiction(s, t, w));
  }
  for (auto& x : wash(s, t)) out.push_back(std::move(x));
  add(obfuscation(s, t));
  return out;
}

/// The alert log a monitor must emit: per trade, raw alerts in (type,
/// subject) order, skipping any whose window overlaps the last emitted
/// window for the same type and subject.
inline std::vector<Expected> alert_log(const StreamSpec& s) {
  std::vector<Expected> log;
  std::map<std::pair<AlertType, std::string>, std::pair<Timestamp, Timestamp>> last;
  for (std::size_t t = 0; t < s.events.size(); ++t) {
    auto raw = raw_alerts(s, t);
    std::stable_sort(raw.begin(), raw.end(), [](const Expected& a, const Expected& b) { return a < b; });
    for (auto& x : raw) {
      const auto key = std::make_pair(x.type, x.subject);
      auto it = last.find(key);
      if (it != last.end() && it->second.first <= x.end && x.start <= it->second.second) continue;
      last[key] = {x.start, x.end};
      log.push_back(std::move(x));
    }
  }
  return log;
}

// ---- threshold optimizer --------------------------------------------------

struct ThresholdAnswer {
  int theta;
  cpp_rational cost;
};

inline cpp_rational cost_at(const std::vector<fcc::investigate::FeedbackRecord>& h, int theta,
                            const fcc::investigate::OptimizerState& st) {
  cpp_rational fn = 0, fp = 0;
  for (const auto& r : h) {
    const bool confirmed = r.analyst_label == fcc::investigate::AnalystLabel::ConfirmedSuspicious;
    if (confirmed && r.case_score < theta) fn += 1;
    if (!confirmed && r.case_score >= theta) fp += 1;
  }
  return rat(st.c_fn) * fn + rat(st.c_fp) * fp;
}

/// Scans every grid point; keeps the first (lowest) minimiser.
inline ThresholdAnswer best_threshold(std::vector<fcc::investigate::FeedbackRecord> h,
                                      const fcc::investigate::OptimizerState& st) {
  if (h.size() > st.history_window) h.erase(h.begin(), h.end() - static_cast<std::ptrdiff_t>(st.history_window));
  if (h.empty()) return {st.theta, 0};
  std::optional<ThresholdAnswer> best;
  for (int theta = 0; theta <= 100; ++theta) {
    if (theta % st.grid_step != 0) continue;
    const cpp_rational j = cost_at(h, theta, st);
    if (!best || j < best->cost) best = ThresholdAnswer{theta, j};
  }
  return *best;
}

// ---- audit hashing --------------------------------------------------------

inline std::string hex_sha256(const std::string& data) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char b : md) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

/// Hand-built canonical body: keys in byte order, no whitespace. Test
/// inputs avoid characters that JSON would escape.
inline std::string canonical(const fcc::audit::AuditRecord& r) {
  auto q = [](const std::string& s) { return "\"" + s + "\""; };
  std::string out = "{";
  out += "\"action\":" + q(r.action);
  out += ",\"agent\":" + q(std::string(fcc::to_string(r.agent.id)));
  out += ",\"agent_version\":" + q(r.agent.version);
  if (r.case_id) out += ",\"case_id\":" + q(*r.case_id);
  out += ",\"input_digest\":" + q(r.input_digest);
  out += ",\"prev_hash\":" + q(r.prev_hash);
  out += ",\"rationale\":" + q(r.rationale);
  out += ",\"seq\":" + std::to_string(r.seq);
  out += ",\"timestamp\":" + q(fcc::format_rfc3339(r.timestamp));
  if (r.tx_id) out += ",\"tx_id\":" + q(*r.tx_id);
  out += "}";
  return out;
}

// ---- cost model -----------------------------------------------------------

struct CostOracle {
  cpp_rational alerts, hours, fte, inference, reduction;
};

inline CostOracle cost(cpp_rational U, cpp_rational R, cpp_rational s, cpp_rational h, cpp_rational Y,
                       cpp_rational k, cpp_rational p, cpp_rational automated_s) {
  CostOracle c;
  c.alerts = U * R * s;
  c.hours = c.alerts * h;
  c.fte = c.hours / Y;
  c.inference = c.alerts * k * p;
  c.reduction = 1 - automated_s / (h * 3600);
  if (c.reduction < 0) c.reduction = 0;
  return c;
}

}  // namespace oracle
