#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/time.hpp"

namespace fcc::monitor {

/// Typology catalog. Declaration order is the deterministic output order.
enum class AlertType {
  NewWallet,
  WashTrading,
  Structuring,
  HighVelocity,
  Obfuscation,
  SanctionsHit,
  HighRiskJurisdiction,
};

inline constexpr std::array kAllAlertTypes{AlertType::NewWallet,    AlertType::WashTrading,
                                           AlertType::Structuring,  AlertType::HighVelocity,
                                           AlertType::Obfuscation,  AlertType::SanctionsHit,
                                           AlertType::HighRiskJurisdiction};

std::string_view to_string(AlertType type);
std::optional<AlertType> parse_alert_type(std::string_view text);
/// Human wording used in narratives ("New Wallet", "Wash Trading", ...).
std::string_view display_name(AlertType type);

/// Closed interval of instants an alert covers.
struct Window {
  Timestamp start{};
  Timestamp end{};

  bool overlaps(const Window& other) const { return start <= other.end && other.start <= end; }
  friend bool operator==(const Window&, const Window&) = default;
};

struct Alert {
  std::string alert_id;
  AlertType type = AlertType::NewWallet;
  std::string subject;                // wallet address or tx_id
  std::vector<std::string> tx_refs;   // non-empty
  int score = 0;
  std::string evidence;
  std::optional<Window> window;
  Timestamp raised_at{};              // timestamp of the trade that raised it
  std::string trigger_tx;             // tx_id of the trade that raised it

  friend bool operator==(const Alert&, const Alert&) = default;
};

enum class RiskBand { Low, Moderate, ModerateHigh, High };

std::string_view to_string(RiskBand band);
std::optional<RiskBand> parse_risk_band(std::string_view text);
/// "low", "moderate", "moderate to high", "high".
std::string_view band_words(RiskBand band);

/// LOW [0,25), MODERATE [25,50), MODERATE_HIGH [50,75), HIGH [75,100].
/// Throws Error(OutOfRange) outside [0,100].
RiskBand risk_band(int score);

struct RiskAggregate {
  std::string subject;
  int score = 0;
  RiskBand band = RiskBand::Low;
  std::vector<std::string> contributing_alerts;

  friend bool operator==(const RiskAggregate&, const RiskAggregate&) = default;
};

nlohmann::json to_json(const Window& window);
nlohmann::json to_json(const Alert& alert);
nlohmann::json to_json(const RiskAggregate& risk);

}  // namespace fcc::monitor
