#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/decimal.hpp"
#include "fcc/common/time.hpp"
#include "fcc/ingest/trade_event.hpp"

namespace fcc::screening {

enum class RiskTier { Low, Medium, High };

std::string_view to_string(RiskTier tier);

struct WalletProfile {
  std::string address;
  Timestamp first_seen{};
  std::size_t trade_count = 0;
  Decimal total_volume_usd;
  std::set<std::string> counterparties;
  std::optional<std::string> jurisdiction;  // ISO-3166 alpha-2, upper case
  RiskTier customer_risk = RiskTier::Low;

  friend bool operator==(const WalletProfile&, const WalletProfile&) = default;
};

/// Profile for a wallet that has no recorded trades yet.
WalletProfile fresh_profile(const std::string& address, Timestamp first_seen);

struct ScreeningLists {
  std::unordered_set<std::string> sanctions;                // lower-case addresses
  std::unordered_set<std::string> high_risk_jurisdictions;  // upper-case codes
};

/// One entry per line; blank lines and `#` comments are skipped, trailing
/// comments and surrounding whitespace are stripped.
std::vector<std::string> read_list(std::istream& in);
std::vector<std::string> read_list_file(const std::filesystem::path& path);

/// Either path may be empty, meaning an empty list.
ScreeningLists load_lists(const std::filesystem::path& sanctions, const std::filesystem::path& jurisdictions);

struct ScreeningResult {
  std::string address;
  bool sanctions_hit = false;
  bool high_risk_jurisdiction = false;
  RiskTier customer_risk = RiskTier::Low;
  std::string rationale;

  friend bool operator==(const ScreeningResult&, const ScreeningResult&) = default;
};

/// Pure. Unknown wallets are screened with an empty profile (no
/// jurisdiction).
ScreeningResult screen_wallet(const std::string& address, const WalletProfile* profile,
                              const ScreeningLists& lists);

/// Applies one trade to `profile`. Throws Error(WalletNotParty) when the
/// trade does not involve the wallet.
WalletProfile update_wallet_profile(WalletProfile profile, const ingest::TradeEvent& event);

nlohmann::json to_json(const ScreeningResult& result);
nlohmann::json to_json(const WalletProfile& profile);

/// Onboarding registry row: a wallet known to the institution before it
/// appears in the monitored stream.
struct RegistryEntry {
  std::string address;
  Timestamp first_seen{};
  std::optional<std::string> jurisdiction;

  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// Line-delimited `{address, first_seen, jurisdiction?}` objects.
std::vector<RegistryEntry> read_wallet_registry(std::istream& in);
std::vector<RegistryEntry> read_wallet_registry_file(const std::filesystem::path& path);

}  // namespace fcc::screening
