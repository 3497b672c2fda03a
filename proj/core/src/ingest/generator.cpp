#include "fcc/ingest/generator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_set>

#include "fcc/common/error.hpp"
#include "fcc/monitor/ruleset.hpp"

namespace fcc::ingest {
namespace {

using monitor::AlertType;
using json = nlohmann::json;

constexpr seconds kHour{3600};

// mt19937_64 output is fully specified by the standard; the transforms on
// top of it are written out so the stream does not depend on the library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::string hex(std::size_t digits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    std::uint64_t bits = 0;
    int remaining = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      if (remaining == 0) {
        bits = next();
        remaining = 16;
      }
      out += kDigits[bits & 0xf];
      bits >>= 4;
      --remaining;
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

struct RingShape {
  std::size_t min_trades;
  std::size_t max_trades;
};

RingShape shape_of(AlertType type) {
  switch (type) {
    case AlertType::WashTrading: return {4, 8};
    case AlertType::Structuring: return {3, 6};
    case AlertType::HighVelocity: return {21, 30};
    case AlertType::Obfuscation: return {3, 6};
    default: return {0, 0};
  }
}

std::size_t wallets_needed(AlertType type, std::size_t trades) {
  switch (type) {
    case AlertType::WashTrading: return 2;
    case AlertType::Structuring: return 1 + trades;
    case AlertType::HighVelocity: return 1 + (trades + 9) / 10;
    case AlertType::Obfuscation: return trades + 1;
    default: return 0;
  }
}

Decimal cents(double usd) {
  const long long c = std::max(1LL, std::llround(usd * 100.0));
  return Decimal::from_micros(c * 10'000);
}

struct Draft {
  TradeEvent event;
  std::optional<AlertType> typology;
  std::string ring_id;
};

class Builder {
 public:
  explicit Builder(const GeneratorConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  SyntheticStream build() {
    SyntheticStream out;
    if (cfg_.n_transactions == 0) return out;

    const auto suspicious_total =
        static_cast<std::size_t>(std::llround(cfg_.target_suspicious_fraction * cfg_.n_transactions));
    const auto allocation = allocate(suspicious_total);
    const auto rings = plan_rings(allocation);

    std::size_t ring_wallets = 0;
    for (const auto& [type, size] : rings) ring_wallets += wallets_needed(type, size);
    const std::size_t benign_count = cfg_.n_transactions - suspicious_total;
    if (ring_wallets > cfg_.n_wallets ||
        (benign_count > 0 && cfg_.n_wallets - ring_wallets < 2)) {
      throw Error(ErrorCode::InfeasibleConfig,
                  "n_wallets=" + std::to_string(cfg_.n_wallets) + " cannot host " +
                      std::to_string(ring_wallets) + " ring wallets plus benign traders");
    }

    make_wallets();
    std::size_t next_wallet = 0;
    std::size_t ring_no = 0;
    for (const auto& [type, size] : rings) {
      std::vector<std::string> members(wallets_.begin() + static_cast<std::ptrdiff_t>(next_wallet),
                                       wallets_.begin() +
                                           static_cast<std::ptrdiff_t>(next_wallet + wallets_needed(type, size)));
      next_wallet += members.size();
      plant(type, size, members, ++ring_no);
    }
    const std::vector<std::string> benign_pool(wallets_.begin() + static_cast<std::ptrdiff_t>(next_wallet),
                                               wallets_.end());
    benign(benign_count, benign_pool);

    std::stable_sort(drafts_.begin(), drafts_.end(), [](const Draft& a, const Draft& b) {
      return a.event.timestamp < b.event.timestamp;
    });
    out.events.reserve(drafts_.size());
    out.labels.reserve(drafts_.size());
    for (Draft& d : drafts_) {
      GroundTruthLabel label{d.event.tx_id, d.typology.has_value(), std::nullopt, std::nullopt};
      if (d.typology) {
        label.planted_typology = std::string(monitor::to_string(*d.typology));
        label.ring_id = d.ring_id;
      }
      out.labels.push_back(std::move(label));
      out.events.push_back(std::move(d.event));
    }
    return out;
  }

 private:
  // Largest-remainder apportionment so the per-typology counts sum exactly.
  std::vector<std::pair<AlertType, std::size_t>> allocate(std::size_t total) const {
    std::vector<std::pair<AlertType, std::size_t>> out;
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (const auto& [type, fraction] : cfg_.pattern_mix) {
      const double exact = fraction * static_cast<double>(total);
      const auto base = static_cast<std::size_t>(std::floor(exact));
      remainders.emplace_back(exact - static_cast<double>(base), out.size());
      out.emplace_back(type, base);
      assigned += base;
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) {
      ++out[remainders[i].second].second;
    }
    return out;
  }

  std::vector<std::pair<AlertType, std::size_t>> plan_rings(
      const std::vector<std::pair<AlertType, std::size_t>>& allocation) {
    std::vector<std::pair<AlertType, std::size_t>> rings;
    for (const auto& [type, count] : allocation) {
      if (count == 0) continue;
      const RingShape shape = shape_of(type);
      if (count < shape.min_trades) {
        throw Error(ErrorCode::InfeasibleConfig,
                    std::string(monitor::to_string(type)) + " needs at least " +
                        std::to_string(shape.min_trades) + " transactions, got " + std::to_string(count));
      }
      std::size_t remaining = count;
      while (remaining > 0) {
        auto size = static_cast<std::size_t>(rng_.between(static_cast<std::int64_t>(shape.min_trades),
                                                          static_cast<std::int64_t>(shape.max_trades)));
        if (size >= remaining || remaining - size < shape.min_trades) size = remaining;
        rings.emplace_back(type, size);
        remaining -= size;
      }
    }
    return rings;
  }

  void make_wallets() {
    std::unordered_set<std::string> seen;
    wallets_.reserve(cfg_.n_wallets);
    while (wallets_.size() < cfg_.n_wallets) {
      std::string w = rng_.hex(40);
      if (seen.insert(w).second) wallets_.push_back(std::move(w));
    }
  }

  std::string tx_id() {
    for (;;) {
      std::string id = rng_.hex(64);
      if (tx_ids_.insert(id).second) return id;
    }
  }

  std::string collection() {
    return "collection-" + std::to_string(rng_.below(std::max<std::size_t>(cfg_.n_collections, 1)));
  }

  Decimal benign_price() {
    return cents(std::exp(cfg_.price_log_mean + cfg_.price_log_sigma * rng_.normal()));
  }

  seconds span() const { return days(static_cast<long long>(cfg_.time_span_days)); }

  // Offsets for `count` trades with gaps in [0, max_gap], capped so the
  // ring fits inside the configured span; returns absolute timestamps.
  std::vector<Timestamp> schedule(std::size_t count, seconds max_gap) {
    if (count > 1) max_gap = std::min(max_gap, span() / static_cast<seconds::rep>(count));
    std::vector<seconds> offsets{seconds{0}};
    for (std::size_t i = 1; i < count; ++i) {
      offsets.push_back(offsets.back() + seconds{rng_.between(0, max_gap.count())});
    }
    const seconds duration = offsets.back();
    const seconds slack = std::max(seconds{0}, span() - duration);
    const Timestamp origin = cfg_.start + seconds{rng_.between(0, slack.count())};
    std::vector<Timestamp> out;
    for (seconds o : offsets) out.push_back(origin + o);
    return out;
  }

  void emit(std::string seller, std::string buyer, std::string item, std::string coll, Decimal value,
            Timestamp at, std::optional<AlertType> typology, const std::string& ring_id) {
    TradeEvent e{tx_id(), std::move(coll), std::move(item), std::move(seller), std::move(buyer), value, at};
    drafts_.push_back({std::move(e), typology, ring_id});
  }

  void plant(AlertType type, std::size_t trades, const std::vector<std::string>& members, std::size_t ring_no) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ring-%05zu", ring_no);
    const std::string ring_id = buf;
    const monitor::RulesetConfig defaults;
    const std::string coll = collection();

    switch (type) {
      case AlertType::WashTrading: {
        // One item passed back and forth at near-constant sub-threshold prices.
        const auto times = schedule(trades, days(6));
        const std::string item = "item-" + ring_id;
        for (std::size_t i = 0; i < trades; ++i) {
          const bool forward = i % 2 == 0;
          const Decimal value = cents(60.0 + 5.0 * rng_.unit());
          emit(forward ? members[0] : members[1], forward ? members[1] : members[0], item, coll, value, times[i],
               type, ring_id);
        }
        break;
      }
      case AlertType::Structuring: {
        // The structuring wallet buys from distinct sellers, each amount in
        // the sub-threshold band.
        const auto times = schedule(trades, days(9));
        const double lo = defaults.kyc_threshold_usd.to_double() * defaults.structuring_band_low.to_double();
        const double hi = defaults.kyc_threshold_usd.to_double() * defaults.structuring_band_high.to_double();
        for (std::size_t i = 0; i < trades; ++i) {
          Decimal value = cents(lo + (hi - lo) * rng_.unit());
          if (!defaults.in_structuring_band(value)) value = cents(lo);
          emit(members[1 + i], members[0], "item-" + ring_id + "-" + std::to_string(i), coll, value, times[i],
               type, ring_id);
        }
        break;
      }
      case AlertType::HighVelocity: {
        const auto times = schedule(trades, seconds{20 * kHour} / static_cast<seconds::rep>(trades));
        const std::size_t sellers = members.size() - 1;
        for (std::size_t i = 0; i < trades; ++i) {
          emit(members[1 + i % sellers], members[0], "item-" + ring_id + "-" + std::to_string(i), coll,
               benign_price(), times[i], type, ring_id);
        }
        break;
      }
      case AlertType::Obfuscation: {
        // One item walked through a chain of fresh wallets.
        const auto times = schedule(trades, days(9));
        const std::string item = "item-" + ring_id;
        for (std::size_t i = 0; i < trades; ++i) {
          emit(members[i], members[i + 1], item, coll, benign_price(), times[i], type, ring_id);
        }
        break;
      }
      default:
        throw Error(ErrorCode::InvalidConfig, "pattern_mix." + std::string(monitor::to_string(type)));
    }
  }

  void benign(std::size_t count, const std::vector<std::string>& pool) {
    if (count == 0) return;
    std::vector<std::int64_t> offsets(count);
    for (auto& o : offsets) o = rng_.between(0, span().count());
    std::sort(offsets.begin(), offsets.end());

    const std::size_t items = std::max<std::size_t>(1, 2 * count);
    std::unordered_map<std::size_t, std::string> owner;
    for (std::int64_t offset : offsets) {
      const std::size_t item = rng_.below(items);
      std::string seller;
      if (auto it = owner.find(item); it != owner.end()) {
        seller = it->second;
      } else {
        seller = pool[rng_.below(pool.size())];
      }
      std::string buyer;
      do {
        buyer = pool[rng_.below(pool.size())];
      } while (buyer == seller);
      owner[item] = buyer;
      emit(std::move(seller), std::move(buyer), "item-" + std::to_string(item),
           "collection-" + std::to_string(item % std::max<std::size_t>(cfg_.n_collections, 1)), benign_price(),
           cfg_.start + seconds{offset}, std::nullopt, {});
    }
  }

  const GeneratorConfig& cfg_;
  Rng rng_;
  std::vector<std::string> wallets_;
  std::unordered_set<std::string> tx_ids_;
  std::vector<Draft> drafts_;
};

}  // namespace

bool is_plantable(AlertType type) {
  return type == AlertType::WashTrading || type == AlertType::Structuring || type == AlertType::HighVelocity ||
         type == AlertType::Obfuscation;
}

void GeneratorConfig::validate() const {
  if (!(target_suspicious_fraction >= 0.0 && target_suspicious_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "target_suspicious_fraction");
  }
  double sum = 0.0;
  for (const auto& [type, fraction] : pattern_mix) {
    if (!is_plantable(type)) throw Error(ErrorCode::InvalidConfig, "pattern_mix." + std::string(to_string(type)));
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "pattern_mix." + std::string(to_string(type)));
    }
    sum += fraction;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::InvalidConfig, "pattern_mix must sum to 1");
  if (!(price_log_sigma >= 0.0) || !std::isfinite(price_log_mean)) {
    throw Error(ErrorCode::InvalidConfig, "price_log_mean/price_log_sigma");
  }
  if (n_transactions > 0 && n_collections == 0) throw Error(ErrorCode::InvalidConfig, "n_collections");
}

SyntheticStream generate_synthetic(const GeneratorConfig& config) {
  config.validate();
  return Builder(config).build();
}

GeneratorConfig GeneratorConfig::from_json(const json& j) {
  GeneratorConfig cfg;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "generator config must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "n_wallets") cfg.n_wallets = value.get<std::size_t>();
      else if (key == "n_collections") cfg.n_collections = value.get<std::size_t>();
      else if (key == "n_transactions") cfg.n_transactions = value.get<std::size_t>();
      else if (key == "target_suspicious_fraction") cfg.target_suspicious_fraction = value.get<double>();
      else if (key == "price_log_mean") cfg.price_log_mean = value.get<double>();
      else if (key == "price_log_sigma") cfg.price_log_sigma = value.get<double>();
      else if (key == "time_span_days") cfg.time_span_days = value.get<std::size_t>();
      else if (key == "start") {
        auto ts = parse_rfc3339(value.get<std::string>());
        if (!ts) throw Error(ErrorCode::InvalidConfig, "start");
        cfg.start = *ts;
      } else if (key == "pattern_mix") {
        cfg.pattern_mix.clear();
        for (const auto& [name, fraction] : value.items()) {
          auto type = monitor::parse_alert_type(name);
          if (!type) throw Error(ErrorCode::InvalidConfig, "pattern_mix." + name);
          cfg.pattern_mix[*type] = fraction.get<double>();
        }
      } else {
        throw Error(ErrorCode::InvalidConfig, "generator." + key);
      }
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidConfig, "generator." + key);
    }
  }
  cfg.validate();
  return cfg;
}

json GeneratorConfig::to_json() const {
  json mix = json::object();
  for (const auto& [type, fraction] : pattern_mix) mix[std::string(monitor::to_string(type))] = fraction;
  return json{
      {"seed", seed},
      {"n_wallets", n_wallets},
      {"n_collections", n_collections},
      {"n_transactions", n_transactions},
      {"target_suspicious_fraction", target_suspicious_fraction},
      {"pattern_mix", mix},
      {"price_log_mean", price_log_mean},
      {"price_log_sigma", price_log_sigma},
      {"time_span_days", time_span_days},
      {"start", format_rfc3339(start)},
  };
}

}  // namespace fcc::ingest
