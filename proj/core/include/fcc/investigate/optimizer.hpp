#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcc/common/decimal.hpp"
#include "fcc/investigate/semantic_cache.hpp"

namespace fcc::investigate {

enum class AnalystLabel { ConfirmedSuspicious, FalsePositive };

std::string_view to_string(AnalystLabel label);
std::optional<AnalystLabel> parse_analyst_label(std::string_view text);

struct FeedbackRecord {
  std::string case_id;
  SemanticKey key;
  int case_score = 0;
  AnalystLabel analyst_label = AnalystLabel::ConfirmedSuspicious;
  Timestamp decided_at{};

  nlohmann::json to_json() const;
  static FeedbackRecord from_json(const nlohmann::json& j);
  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

/// Escalation threshold and the cost weights it is calibrated against.
struct OptimizerState {
  int theta = 50;
  Decimal c_fn = Decimal::from_int(5);
  Decimal c_fp = Decimal::from_int(1);
  int grid_step = 5;
  std::size_t history_window = 500;
  std::size_t auto_every = 25;  // feedback records between automatic runs; 0 disables

  /// Throws Error(InvalidConfig).
  void validate() const;
  static OptimizerState from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// c_fn * #{confirmed with score < theta} + c_fp * #{false positive with score >= theta}.
Decimal threshold_cost(std::span<const FeedbackRecord> history, int theta, const OptimizerState& state);

struct ThresholdResult {
  int theta_before = 0;
  int theta_after = 0;
  Decimal cost_before;
  Decimal cost_after;
  std::size_t records_used = 0;

  bool changed() const { return theta_before != theta_after; }
  nlohmann::json to_json() const;
};

/// Grid search over {0, step, ..., 100} using the most recent
/// `history_window` records; ties go to the lowest theta. An empty history
/// leaves theta unchanged.
ThresholdResult optimize_threshold(std::span<const FeedbackRecord> history, const OptimizerState& state);

/// Store of analyst feedback, at most one record per case.
class ReinforcementCache {
 public:
  /// Throws Error(DuplicateFeedback).
  const FeedbackRecord& add(FeedbackRecord record);
  bool contains(const std::string& case_id) const { return by_case_.contains(case_id); }
  const std::vector<FeedbackRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t count(AnalystLabel label) const;
  /// One record per line.
  void export_lines(std::ostream& out) const;

 private:
  std::vector<FeedbackRecord> records_;
  std::unordered_map<std::string, std::size_t> by_case_;
};

}  // namespace fcc::investigate
