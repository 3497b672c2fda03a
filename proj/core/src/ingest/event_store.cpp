#include "fcc/ingest/event_store.hpp"

#include <unordered_set>

#include "fcc/common/error.hpp"

namespace fcc::ingest {

IngestSummary EventStore::ingest_batch(std::span<const TradeEvent> events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Timestamp previous = i == 0 ? last_timestamp().value_or(Timestamp::min()) : events[i - 1].timestamp;
    if (events[i].timestamp < previous) throw Error(ErrorCode::OutOfOrderBatch, std::to_string(i));
  }

  IngestSummary summary;
  for (const TradeEvent& e : events) {
    if (e.value_usd.is_negative()) throw Error(ErrorCode::MalformedValue, "value_usd");
    if (by_tx_.contains(e.tx_id)) {
      ++summary.rejected;
      continue;
    }
    const std::size_t index = events_.size();
    events_.push_back(e);
    by_tx_.emplace(e.tx_id, index);
    for (const std::string* wallet : {&e.seller, &e.buyer}) {
      auto& trades = by_wallet_[*wallet];
      if (trades.empty() || trades.back() != index) trades.push_back(index);
      if (first_seen_.emplace(*wallet, e.timestamp).second) ++summary.first_seen_wallets;
    }
    if (sink_.is_open()) sink_ << serialize_trade_event(e) << '\n';
    ++summary.accepted;
  }
  if (sink_.is_open()) {
    sink_.flush();
    if (!sink_) throw Error(ErrorCode::IoError, "event store append failed");
  }
  return summary;
}

void EventStore::seed_wallet(const std::string& address, Timestamp first_seen) {
  auto [it, inserted] = first_seen_.emplace(address, first_seen);
  if (!inserted && first_seen < it->second) it->second = first_seen;
}

void EventStore::attach_file(const std::filesystem::path& path) {
  sink_.close();
  sink_.open(path, std::ios::binary | std::ios::app);
  if (!sink_) throw Error(ErrorCode::IoError, "cannot open " + path.string());
}

const TradeEvent* EventStore::find(const std::string& tx_id) const {
  auto it = by_tx_.find(tx_id);
  return it == by_tx_.end() ? nullptr : &events_[it->second];
}

std::optional<Timestamp> EventStore::first_seen(const std::string& address) const {
  auto it = first_seen_.find(address);
  if (it == first_seen_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> EventStore::wallet_trades(const std::string& address) const {
  auto it = by_wallet_.find(address);
  if (it == by_wallet_.end()) return {};
  return it->second;
}

std::optional<Timestamp> EventStore::last_timestamp() const {
  if (events_.empty()) return std::nullopt;
  return events_.back().timestamp;
}

}  // namespace fcc::ingest
