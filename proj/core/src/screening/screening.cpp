#include "fcc/screening/screening.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "fcc/common/error.hpp"
#include "fcc/common/hex.hpp"

namespace fcc::screening {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(RiskTier tier) {
  switch (tier) {
    case RiskTier::Low: return "LOW";
    case RiskTier::Medium: return "MEDIUM";
    case RiskTier::High: return "HIGH";
  }
  return "UNKNOWN";
}

WalletProfile fresh_profile(const std::string& address, Timestamp first_seen) {
  WalletProfile p;
  p.address = address;
  p.first_seen = first_seen;
  return p;
}

std::vector<std::string> read_list(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (!view.empty()) out.emplace_back(view);
  }
  return out;
}

std::vector<std::string> read_list_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_list(in);
}

ScreeningLists load_lists(const std::filesystem::path& sanctions, const std::filesystem::path& jurisdictions) {
  ScreeningLists lists;
  if (!sanctions.empty()) {
    for (const auto& entry : read_list_file(sanctions)) lists.sanctions.insert(to_lower(entry));
  }
  if (!jurisdictions.empty()) {
    for (const auto& entry : read_list_file(jurisdictions)) lists.high_risk_jurisdictions.insert(to_upper(entry));
  }
  return lists;
}

ScreeningResult screen_wallet(const std::string& address, const WalletProfile* profile,
                              const ScreeningLists& lists) {
  ScreeningResult r;
  r.address = to_lower(address);
  r.sanctions_hit = lists.sanctions.contains(r.address);

  std::optional<std::string> jurisdiction;
  if (profile != nullptr && profile->jurisdiction) jurisdiction = to_upper(*profile->jurisdiction);
  r.high_risk_jurisdiction = jurisdiction && lists.high_risk_jurisdictions.contains(*jurisdiction);

  if (r.sanctions_hit) r.customer_risk = RiskTier::High;
  else if (r.high_risk_jurisdiction) r.customer_risk = RiskTier::Medium;
  else r.customer_risk = RiskTier::Low;

  std::string jurisdiction_note =
      jurisdiction ? "jurisdiction " + *jurisdiction + (r.high_risk_jurisdiction ? " is high-risk" : " is not high-risk")
                   : "jurisdiction unknown";
  if (!r.sanctions_hit && !r.high_risk_jurisdiction) {
    r.rationale = "No sanctions or high-risk jurisdiction issues were found for " + r.address +
                  " (sanctions list checked, " + jurisdiction_note + "); customer risk LOW.";
  } else {
    r.rationale = "Screening of " + r.address + ": " +
                  (r.sanctions_hit ? std::string("address is on the sanctions list")
                                   : std::string("no sanctions match")) +
                  ", " + jurisdiction_note + "; customer risk " + std::string(to_string(r.customer_risk)) + ".";
  }
  return r;
}

WalletProfile update_wallet_profile(WalletProfile profile, const ingest::TradeEvent& event) {
  if (!event.involves(profile.address)) throw Error(ErrorCode::WalletNotParty, profile.address);
  // A default-constructed profile has no first-seen instant yet.
  const bool unset = profile.trade_count == 0 && profile.first_seen == Timestamp{};
  profile.first_seen = unset ? event.timestamp : std::min(profile.first_seen, event.timestamp);
  ++profile.trade_count;
  profile.total_volume_usd += event.value_usd;
  profile.counterparties.insert(event.seller == profile.address ? event.buyer : event.seller);
  return profile;
}

nlohmann::json to_json(const ScreeningResult& result) {
  return {
      {"address", result.address},
      {"sanctions_hit", result.sanctions_hit},
      {"high_risk_jurisdiction", result.high_risk_jurisdiction},
      {"customer_risk", to_string(result.customer_risk)},
      {"rationale", result.rationale},
  };
}

nlohmann::json to_json(const WalletProfile& profile) {
  return {
      {"address", profile.address},
      {"first_seen", format_rfc3339(profile.first_seen)},
      {"trade_count", profile.trade_count},
      {"total_volume_usd", profile.total_volume_usd.to_string()},
      {"counterparties", profile.counterparties},
      {"jurisdiction", profile.jurisdiction ? nlohmann::json(*profile.jurisdiction) : nlohmann::json()},
      {"customer_risk", to_string(profile.customer_risk)},
  };
}

std::vector<RegistryEntry> read_wallet_registry(std::istream& in) {
  std::vector<RegistryEntry> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const std::string where = "registry line " + std::to_string(line_number);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::MalformedValue, where);
    }
    if (!j.is_object()) throw Error(ErrorCode::MalformedValue, where);
    RegistryEntry e;
    if (!j.contains("address")) throw Error(ErrorCode::MissingField, "address");
    if (!j.contains("first_seen")) throw Error(ErrorCode::MissingField, "first_seen");
    if (!j["address"].is_string() || !is_wallet_address(j["address"].get<std::string>())) {
      throw Error(ErrorCode::MalformedValue, "address");
    }
    e.address = to_lower(j["address"].get<std::string>());
    auto ts = j["first_seen"].is_string() ? parse_rfc3339(j["first_seen"].get<std::string>()) : std::nullopt;
    if (!ts) throw Error(ErrorCode::MalformedValue, "first_seen");
    e.first_seen = *ts;
    if (j.contains("jurisdiction") && !j["jurisdiction"].is_null()) {
      if (!j["jurisdiction"].is_string()) throw Error(ErrorCode::MalformedValue, "jurisdiction");
      e.jurisdiction = to_upper(j["jurisdiction"].get<std::string>());
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<RegistryEntry> read_wallet_registry_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_wallet_registry(in);
}

}  // namespace fcc::screening
