#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/decimal.hpp"
#include "fcc/monitor/alert.hpp"
#include "fcc/monitor/monitor.hpp"
#include "fcc/screening/screening.hpp"

namespace fcc::investigate {

struct SubjectWallet {
  std::string address;
  std::string role;  // "seller", "buyer" or "buyer and seller"

  friend bool operator==(const SubjectWallet&, const SubjectWallet&) = default;
};

/// Activity of the focus wallet over the look-back window ending at the
/// case's latest transaction.
struct BehaviorSummary {
  std::string focus_wallet;
  std::string counterparty;  // most alternating counterparty, empty if none
  std::size_t trade_count_30d = 0;
  Decimal value_min;
  Decimal value_max;
  int alternation_count = 0;
  long long wallet_age_days = 0;
  Timestamp window_start{};
  Timestamp window_end{};

  friend bool operator==(const BehaviorSummary&, const BehaviorSummary&) = default;
};

struct CaseContext {
  std::string case_id;
  std::string flagged_tx;  // trigger of the earliest-raised alert
  std::vector<SubjectWallet> subjects;
  std::vector<std::string> tx_refs;  // stream order
  std::vector<monitor::Alert> alerts;
  monitor::RiskAggregate risk;
  std::vector<screening::ScreeningResult> screening;
  BehaviorSummary behavior;

  friend bool operator==(const CaseContext&, const CaseContext&) = default;
};

/// Assembles a case from connected alerts. Behaviour, profiles and
/// screening come from the monitoring state. Throws Error(DisjointAlerts)
/// when the alerts do not form one connected group through shared wallets
/// or transactions (or when there are none).
CaseContext build_case_context(const std::string& case_id, std::span<const monitor::Alert> alerts,
                               const monitor::Monitor& state);

nlohmann::json to_json(const BehaviorSummary& summary);
nlohmann::json to_json(const CaseContext& context);

}  // namespace fcc::investigate
