#include "fcc/monitor/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <unordered_map>
#include <unordered_set>

namespace fcc::monitor {

double DetectionReport::suspicious_fraction() const {
  return transactions == 0 ? 0.0 : static_cast<double>(suspicious_transactions) / static_cast<double>(transactions);
}

double DetectionReport::recall() const {
  return planted_rings == 0 ? 1.0 : static_cast<double>(detected_rings) / static_cast<double>(planted_rings);
}

double DetectionReport::false_positive_rate() const {
  return benign_transactions == 0 ? 0.0
                                  : static_cast<double>(benign_flagged) / static_cast<double>(benign_transactions);
}

double DetectionReport::alert_multiplicity() const {
  return suspicious_transactions == 0 ? 0.0
                                      : static_cast<double>(total_alerts) / static_cast<double>(suspicious_transactions);
}

nlohmann::json DetectionReport::to_json() const {
  nlohmann::json by_type = nlohmann::json::object();
  for (const auto& [type, count] : alerts_by_type) by_type[std::string(to_string(type))] = count;
  return {
      {"transactions", transactions},
      {"suspicious_transactions", suspicious_transactions},
      {"benign_transactions", benign_transactions},
      {"suspicious_fraction", suspicious_fraction()},
      {"total_alerts", total_alerts},
      {"alerts_by_type", by_type},
      {"alert_multiplicity", alert_multiplicity()},
      {"planted_rings", planted_rings},
      {"detected_rings", detected_rings},
      {"missed_rings", missed_rings},
      {"recall", recall()},
      {"benign_flagged", benign_flagged},
      {"false_positive_rate", false_positive_rate()},
  };
}

DetectionReport evaluate_detection(std::span<const ingest::GroundTruthLabel> labels, std::span<const Alert> alerts) {
  DetectionReport r;
  r.transactions = labels.size();
  r.total_alerts = alerts.size();

  std::unordered_map<std::string, const ingest::GroundTruthLabel*> by_tx;
  std::map<std::string, std::string> ring_type;  // ordered for stable missed_rings
  for (const auto& label : labels) {
    by_tx.emplace(label.tx_id, &label);
    if (label.suspicious) {
      ++r.suspicious_transactions;
      if (label.ring_id) ring_type.emplace(*label.ring_id, label.planted_typology.value_or(""));
    } else {
      ++r.benign_transactions;
    }
  }
  r.planted_rings = ring_type.size();

  std::set<std::string> detected;
  std::unordered_set<std::string> flagged;
  for (const Alert& a : alerts) {
    ++r.alerts_by_type[a.type];
    for (const auto& ref : a.tx_refs) {
      auto it = by_tx.find(ref);
      if (it == by_tx.end()) continue;
      const auto& label = *it->second;
      if (!label.suspicious) {
        if (a.type != AlertType::NewWallet) flagged.insert(ref);
      } else if (label.ring_id && label.planted_typology == to_string(a.type)) {
        detected.insert(*label.ring_id);
      }
    }
  }
  r.detected_rings = detected.size();
  r.benign_flagged = flagged.size();
  for (const auto& [ring, type] : ring_type) {
    if (!detected.contains(ring)) r.missed_rings.push_back(ring);
  }
  return r;
}

}  // namespace fcc::monitor
