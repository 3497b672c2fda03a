#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcc/common/decimal.hpp"
#include "fcc/common/time.hpp"

namespace fcc::ingest {

/// One marketplace trade. Addresses are normalized to lower case.
struct TradeEvent {
  std::string tx_id;
  std::string collection_id;
  std::string item_id;
  std::string seller;
  std::string buyer;
  Decimal value_usd;
  Timestamp timestamp{};

  bool involves(std::string_view wallet) const { return seller == wallet || buyer == wallet; }
  bool is_self_trade() const { return seller == buyer; }

  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

/// Parses one ingestion record. Throws Error(MissingField) or
/// Error(MalformedValue) naming the field.
TradeEvent parse_trade_event(std::string_view line);
std::string serialize_trade_event(const TradeEvent& event);

struct GroundTruthLabel {
  std::string tx_id;
  bool suspicious = false;
  std::optional<std::string> planted_typology;
  std::optional<std::string> ring_id;

  friend bool operator==(const GroundTruthLabel&, const GroundTruthLabel&) = default;
};

GroundTruthLabel parse_label(std::string_view line);
std::string serialize_label(const GroundTruthLabel& label);

struct ParseFailure {
  std::size_t line_number = 0;  // 1-based
  std::string message;
};

struct ParsedStream {
  std::vector<TradeEvent> events;
  std::vector<ParseFailure> failures;
};

/// Reads a line-delimited stream; blank lines are skipped, bad lines are
/// collected rather than thrown.
ParsedStream read_trade_events(std::istream& in);
std::vector<GroundTruthLabel> read_labels(std::istream& in);

}  // namespace fcc::ingest
