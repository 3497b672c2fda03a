#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/ingest/trade_event.hpp"
#include "fcc/monitor/alert.hpp"

namespace fcc::monitor {

/// Detection quality of an alert set against generator labels.
///
/// A planted ring counts as detected when some alert of the planted type
/// references one of the ring's transactions. The false-positive rate is
/// the share of benign transactions referenced by any typology alert;
/// NEW_WALLET is an onboarding signal and is not counted there.
struct DetectionReport {
  std::size_t transactions = 0;
  std::size_t suspicious_transactions = 0;
  std::size_t benign_transactions = 0;
  std::size_t total_alerts = 0;
  std::map<AlertType, std::size_t> alerts_by_type;
  std::size_t planted_rings = 0;
  std::size_t detected_rings = 0;
  std::vector<std::string> missed_rings;
  std::size_t benign_flagged = 0;

  double suspicious_fraction() const;
  double recall() const;
  double false_positive_rate() const;
  double alert_multiplicity() const;
  nlohmann::json to_json() const;
};

DetectionReport evaluate_detection(std::span<const ingest::GroundTruthLabel> labels, std::span<const Alert> alerts);

}  // namespace fcc::monitor
