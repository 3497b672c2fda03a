#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fcc/ingest/trade_event.hpp"

namespace fcc::ingest {

struct IngestSummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t first_seen_wallets = 0;

  friend bool operator==(const IngestSummary&, const IngestSummary&) = default;
};

/// Append-only trade store with a per-wallet index and the first-seen
/// registry. Single writer.
class EventStore {
 public:
  EventStore() = default;
  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  /// Appends a time-ordered batch. The whole batch is refused with
  /// Error(OutOfOrderBatch, index) if a timestamp decreases, either inside
  /// the batch or relative to the last stored event. Duplicate tx_ids are
  /// counted as rejected and skipped.
  IngestSummary ingest_batch(std::span<const TradeEvent> events);

  /// Registers a wallet known before any stored trade (onboarding).
  void seed_wallet(const std::string& address, Timestamp first_seen);

  /// Mirrors every subsequent append to `path` (line-delimited).
  void attach_file(const std::filesystem::path& path);

  const std::vector<TradeEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  const TradeEvent* find(const std::string& tx_id) const;
  std::optional<Timestamp> first_seen(const std::string& address) const;
  /// Indexes into events() of trades involving `address`, in stream order.
  std::span<const std::size_t> wallet_trades(const std::string& address) const;
  std::optional<Timestamp> last_timestamp() const;

 private:
  std::vector<TradeEvent> events_;
  std::unordered_map<std::string, std::size_t> by_tx_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_wallet_;
  std::unordered_map<std::string, Timestamp> first_seen_;
  std::ofstream sink_;
};

}  // namespace fcc::ingest
