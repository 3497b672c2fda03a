#include "fcc/ingest/trade_event.hpp"

#include <nlohmann/json.hpp>

#include "fcc/common/error.hpp"
#include "fcc/common/hex.hpp"

namespace fcc::ingest {
namespace {

using json = nlohmann::json;

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw Error(ErrorCode::MissingField, key);
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw Error(ErrorCode::MalformedValue, key);
  return v.get<std::string>();
}

Decimal parse_value(const json& v) {
  std::optional<Decimal> d;
  if (v.is_string()) {
    d = Decimal::parse(v.get_ref<const std::string&>());
  } else if (v.is_number_integer()) {
    d = Decimal::from_int(v.get<std::int64_t>());
  } else if (v.is_number_float()) {
    d = Decimal::from_double(v.get<double>());
  }
  if (!d || d->is_negative()) throw Error(ErrorCode::MalformedValue, "value_usd");
  return *d;
}

json parse_object(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::MalformedValue, "record");
  return j;
}

}  // namespace

TradeEvent parse_trade_event(std::string_view line) {
  const json j = parse_object(line);
  TradeEvent e;

  e.tx_id = to_lower(require_string(j, "tx_id"));
  if (!is_tx_hash(e.tx_id)) throw Error(ErrorCode::MalformedValue, "tx_id");
  e.collection_id = require_string(j, "collection_id");
  e.item_id = require_string(j, "item_id");
  e.seller = to_lower(require_string(j, "seller"));
  if (!is_wallet_address(e.seller)) throw Error(ErrorCode::MalformedValue, "seller");
  e.buyer = to_lower(require_string(j, "buyer"));
  if (!is_wallet_address(e.buyer)) throw Error(ErrorCode::MalformedValue, "buyer");
  e.value_usd = parse_value(require(j, "value_usd"));
  auto ts = parse_rfc3339(require_string(j, "timestamp"));
  if (!ts) throw Error(ErrorCode::MalformedValue, "timestamp");
  e.timestamp = *ts;
  return e;
}

std::string serialize_trade_event(const TradeEvent& e) {
  // Hand-built so value_usd is emitted as an exact decimal literal.
  std::string out = "{\"tx_id\":";
  out += json(e.tx_id).dump();
  out += ",\"collection_id\":";
  out += json(e.collection_id).dump();
  out += ",\"item_id\":";
  out += json(e.item_id).dump();
  out += ",\"seller\":";
  out += json(e.seller).dump();
  out += ",\"buyer\":";
  out += json(e.buyer).dump();
  out += ",\"value_usd\":";
  out += e.value_usd.to_string();
  out += ",\"timestamp\":\"";
  out += format_rfc3339(e.timestamp);
  out += "\"}";
  return out;
}

GroundTruthLabel parse_label(std::string_view line) {
  const json j = parse_object(line);
  GroundTruthLabel label;
  label.tx_id = to_lower(require_string(j, "tx_id"));
  const json& suspicious = require(j, "suspicious");
  if (!suspicious.is_boolean()) throw Error(ErrorCode::MalformedValue, "suspicious");
  label.suspicious = suspicious.get<bool>();
  if (auto it = j.find("planted_typology"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::MalformedValue, "planted_typology");
    label.planted_typology = it->get<std::string>();
  }
  if (auto it = j.find("ring_id"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::MalformedValue, "ring_id");
    label.ring_id = it->get<std::string>();
  }
  if (label.suspicious != label.planted_typology.has_value()) {
    throw Error(ErrorCode::MalformedValue, "planted_typology");
  }
  return label;
}

std::string serialize_label(const GroundTruthLabel& label) {
  json j;
  j["tx_id"] = label.tx_id;
  j["suspicious"] = label.suspicious;
  j["planted_typology"] = label.planted_typology ? json(*label.planted_typology) : json(nullptr);
  j["ring_id"] = label.ring_id ? json(*label.ring_id) : json(nullptr);
  return j.dump();
}

ParsedStream read_trade_events(std::istream& in) {
  ParsedStream out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.events.push_back(parse_trade_event(line));
    } catch (const Error& e) {
      out.failures.push_back({n, e.what()});
    }
  }
  return out;
}

std::vector<GroundTruthLabel> read_labels(std::istream& in) {
  std::vector<GroundTruthLabel> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_label(line));
  }
  return out;
}

}  // namespace fcc::ingest
