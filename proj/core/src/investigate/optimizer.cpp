#include "fcc/investigate/optimizer.hpp"

#include <nlohmann/json.hpp>

#include "fcc/common/error.hpp"

namespace fcc::investigate {
namespace {

Decimal read_weight(const nlohmann::json& v, const char* key) {
  std::optional<Decimal> d;
  if (v.is_string()) d = Decimal::parse(v.get_ref<const std::string&>());
  else if (v.is_number_integer()) d = Decimal::from_int(v.get<std::int64_t>());
  else if (v.is_number_float()) d = Decimal::from_double(v.get<double>());
  if (!d) throw Error(ErrorCode::InvalidConfig, key);
  return *d;
}

Decimal times(Decimal weight, std::size_t count) {
  return Decimal::from_micros(weight.micros() * static_cast<std::int64_t>(count));
}

}  // namespace

std::string_view to_string(AnalystLabel label) {
  return label == AnalystLabel::ConfirmedSuspicious ? "CONFIRMED_SUSPICIOUS" : "FALSE_POSITIVE";
}

std::optional<AnalystLabel> parse_analyst_label(std::string_view text) {
  if (text == "CONFIRMED_SUSPICIOUS") return AnalystLabel::ConfirmedSuspicious;
  if (text == "FALSE_POSITIVE") return AnalystLabel::FalsePositive;
  return std::nullopt;
}

nlohmann::json FeedbackRecord::to_json() const {
  return {
      {"case_id", case_id},
      {"key", key.to_json()},
      {"case_score", case_score},
      {"analyst_label", investigate::to_string(analyst_label)},
      {"decided_at", format_rfc3339(decided_at)},
  };
}

FeedbackRecord FeedbackRecord::from_json(const nlohmann::json& j) {
  FeedbackRecord r;
  try {
    r.case_id = j.at("case_id").get<std::string>();
    r.key = SemanticKey::from_json(j.at("key"));
    r.case_score = j.at("case_score").get<int>();
    auto label = parse_analyst_label(j.at("analyst_label").get<std::string>());
    if (!label) throw Error(ErrorCode::MalformedValue, "analyst_label");
    r.analyst_label = *label;
    auto at = parse_rfc3339(j.at("decided_at").get<std::string>());
    if (!at) throw Error(ErrorCode::MalformedValue, "decided_at");
    r.decided_at = *at;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedValue, e.what());
  }
  return r;
}

void OptimizerState::validate() const {
  if (grid_step <= 0 || 100 % grid_step != 0) throw Error(ErrorCode::InvalidConfig, "optimizer.grid_step");
  if (theta < 0 || theta > 100 || theta % grid_step != 0) throw Error(ErrorCode::InvalidConfig, "optimizer.theta");
  if (c_fn <= Decimal{}) throw Error(ErrorCode::InvalidConfig, "optimizer.c_fn");
  if (c_fp <= Decimal{}) throw Error(ErrorCode::InvalidConfig, "optimizer.c_fp");
  if (history_window == 0) throw Error(ErrorCode::InvalidConfig, "optimizer.history_window");
}

OptimizerState OptimizerState::from_json(const nlohmann::json& j) {
  OptimizerState s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "optimizer");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "theta") s.theta = value.get<int>();
      else if (key == "c_fn") s.c_fn = read_weight(value, "optimizer.c_fn");
      else if (key == "c_fp") s.c_fp = read_weight(value, "optimizer.c_fp");
      else if (key == "grid_step") s.grid_step = value.get<int>();
      else if (key == "history_window") s.history_window = value.get<std::size_t>();
      else if (key == "auto_every") s.auto_every = value.get<std::size_t>();
      else throw Error(ErrorCode::InvalidConfig, "optimizer." + key);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::InvalidConfig, "optimizer." + key);
    }
  }
  s.validate();
  return s;
}

nlohmann::json OptimizerState::to_json() const {
  return {
      {"theta", theta},
      {"c_fn", c_fn.to_string()},
      {"c_fp", c_fp.to_string()},
      {"grid_step", grid_step},
      {"history_window", history_window},
      {"auto_every", auto_every},
  };
}

Decimal threshold_cost(std::span<const FeedbackRecord> history, int theta, const OptimizerState& state) {
  std::size_t missed = 0;
  std::size_t false_alarms = 0;
  for (const auto& r : history) {
    if (r.analyst_label == AnalystLabel::ConfirmedSuspicious && r.case_score < theta) ++missed;
    if (r.analyst_label == AnalystLabel::FalsePositive && r.case_score >= theta) ++false_alarms;
  }
  return times(state.c_fn, missed) + times(state.c_fp, false_alarms);
}

nlohmann::json ThresholdResult::to_json() const {
  return {
      {"theta_before", theta_before},
      {"theta_after", theta_after},
      {"cost_before", cost_before.to_string()},
      {"cost_after", cost_after.to_string()},
      {"records_used", records_used},
      {"changed", changed()},
  };
}

ThresholdResult optimize_threshold(std::span<const FeedbackRecord> history, const OptimizerState& state) {
  state.validate();
  if (history.size() > state.history_window) history = history.last(state.history_window);
  ThresholdResult r;
  r.theta_before = state.theta;
  r.theta_after = state.theta;
  r.records_used = history.size();
  r.cost_before = threshold_cost(history, state.theta, state);
  r.cost_after = r.cost_before;
  if (history.empty()) return r;

  std::optional<Decimal> best;
  for (int theta = 0; theta <= 100; theta += state.grid_step) {
    const Decimal cost = threshold_cost(history, theta, state);
    if (!best || cost < *best) {
      best = cost;
      r.theta_after = theta;
    }
  }
  r.cost_after = *best;
  return r;
}

const FeedbackRecord& ReinforcementCache::add(FeedbackRecord record) {
  if (by_case_.contains(record.case_id)) throw Error(ErrorCode::DuplicateFeedback, record.case_id);
  by_case_.emplace(record.case_id, records_.size());
  records_.push_back(std::move(record));
  return records_.back();
}

std::size_t ReinforcementCache::count(AnalystLabel label) const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.analyst_label == label ? 1 : 0;
  return n;
}

void ReinforcementCache::export_lines(std::ostream& out) const {
  for (const auto& r : records_) out << r.to_json().dump() << '\n';
}

}  // namespace fcc::investigate
