#include "fcc/monitor/alert.hpp"

#include <nlohmann/json.hpp>

#include "fcc/common/error.hpp"

namespace fcc::monitor {

std::string_view to_string(AlertType type) {
  switch (type) {
    case AlertType::NewWallet: return "NEW_WALLET";
    case AlertType::WashTrading: return "WASH_TRADING";
    case AlertType::Structuring: return "STRUCTURING";
    case AlertType::HighVelocity: return "HIGH_VELOCITY";
    case AlertType::Obfuscation: return "OBFUSCATION";
    case AlertType::SanctionsHit: return "SANCTIONS_HIT";
    case AlertType::HighRiskJurisdiction: return "HIGH_RISK_JURISDICTION";
  }
  return "UNKNOWN";
}

std::optional<AlertType> parse_alert_type(std::string_view text) {
  for (AlertType t : kAllAlertTypes) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::string_view display_name(AlertType type) {
  switch (type) {
    case AlertType::NewWallet: return "New Wallet";
    case AlertType::WashTrading: return "Wash Trading";
    case AlertType::Structuring: return "Structuring";
    case AlertType::HighVelocity: return "High Velocity";
    case AlertType::Obfuscation: return "Obfuscation";
    case AlertType::SanctionsHit: return "Sanctions Hit";
    case AlertType::HighRiskJurisdiction: return "High-Risk Jurisdiction";
  }
  return "Unknown";
}

std::string_view to_string(RiskBand band) {
  switch (band) {
    case RiskBand::Low: return "LOW";
    case RiskBand::Moderate: return "MODERATE";
    case RiskBand::ModerateHigh: return "MODERATE_HIGH";
    case RiskBand::High: return "HIGH";
  }
  return "UNKNOWN";
}

std::optional<RiskBand> parse_risk_band(std::string_view text) {
  for (RiskBand b : {RiskBand::Low, RiskBand::Moderate, RiskBand::ModerateHigh, RiskBand::High}) {
    if (to_string(b) == text) return b;
  }
  return std::nullopt;
}

std::string_view band_words(RiskBand band) {
  switch (band) {
    case RiskBand::Low: return "low";
    case RiskBand::Moderate: return "moderate";
    case RiskBand::ModerateHigh: return "moderate to high";
    case RiskBand::High: return "high";
  }
  return "unknown";
}

RiskBand risk_band(int score) {
  if (score < 0 || score > 100) throw Error(ErrorCode::OutOfRange, std::to_string(score));
  if (score < 25) return RiskBand::Low;
  if (score < 50) return RiskBand::Moderate;
  if (score < 75) return RiskBand::ModerateHigh;
  return RiskBand::High;
}

nlohmann::json to_json(const Window& window) {
  return {{"start", format_rfc3339(window.start)}, {"end", format_rfc3339(window.end)}};
}

nlohmann::json to_json(const Alert& alert) {
  return {
      {"alert_id", alert.alert_id},
      {"alert_type", to_string(alert.type)},
      {"subject", alert.subject},
      {"tx_refs", alert.tx_refs},
      {"score", alert.score},
      {"evidence", alert.evidence},
      {"window", alert.window ? to_json(*alert.window) : nlohmann::json()},
      {"raised_at", format_rfc3339(alert.raised_at)},
      {"trigger_tx", alert.trigger_tx},
  };
}

nlohmann::json to_json(const RiskAggregate& risk) {
  return {
      {"subject", risk.subject},
      {"score", risk.score},
      {"band", to_string(risk.band)},
      {"contributing_alerts", risk.contributing_alerts},
  };
}

}  // namespace fcc::monitor
