#include "fcc/report/str_report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "fcc/common/error.hpp"

namespace fcc::report {
namespace {

using nlohmann::json;

std::string date_of(Timestamp ts) { return format_rfc3339(ts).substr(0, 10); }

std::string money(Decimal d) { return "$" + d.to_string(); }

std::string role_of(const StrReport& r, const std::string& wallet) {
  for (const auto& s : r.subjects) {
    if (s.address == wallet) return s.role;
  }
  return "related";
}

Timestamp read_time(const json& j, const char* field) {
  auto ts = j.is_string() ? parse_rfc3339(j.get<std::string>()) : std::nullopt;
  if (!ts) throw Error(ErrorCode::MalformedValue, field);
  return *ts;
}

Decimal read_money(const json& j, const char* field) {
  auto d = j.is_string() ? Decimal::parse(j.get<std::string>()) : std::nullopt;
  if (!d) throw Error(ErrorCode::MalformedValue, field);
  return *d;
}

std::string recommendation_for(const StrReport& r) {
  const std::string& focus = r.findings.focus_wallet;
  return "Keep the " + role_of(r, focus) + " wallet " + focus +
         " under further monitoring and refer the case for regulatory follow-up.";
}

}  // namespace

json StrReport::to_json() const {
  json subjects_json = json::array();
  for (const auto& s : subjects) subjects_json.push_back({{"address", s.address}, {"role", s.role}});
  json alerts = json::array();
  for (const auto& a : alert_summary) {
    alerts.push_back({{"alert_id", a.alert_id},
                      {"alert_type", monitor::to_string(a.type)},
                      {"subject", a.subject},
                      {"score", a.score},
                      {"evidence", a.evidence}});
  }
  return {
      {"report_id", report_id},
      {"version", version},
      {"supersedes", supersedes ? json(*supersedes) : json()},
      {"case_id", case_id},
      {"created_at", format_rfc3339(created_at)},
      {"reporting_entity", reporting_entity},
      {"subjects", subjects_json},
      {"flagged_tx", flagged_tx},
      {"tx_refs", tx_refs},
      {"trigger_alert_id", trigger_alert_id},
      {"alert_summary", alerts},
      {"findings", investigate::to_json(findings)},
      {"risk_score", risk_score},
      {"risk_band", monitor::to_string(risk_band)},
      {"screening_clean", screening_clean},
      {"screening_summary", screening_summary},
      {"narrative", narrative},
      {"recommendation", recommendation},
      {"regulatory_basis", regulatory_basis},
      {"audit_refs", audit_refs},
  };
}

StrReport StrReport::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedValue, "report");
  StrReport r;
  try {
    r.report_id = j.at("report_id").get<std::string>();
    r.version = j.at("version").get<int>();
    if (!j.at("supersedes").is_null()) r.supersedes = j.at("supersedes").get<std::string>();
    r.case_id = j.at("case_id").get<std::string>();
    r.created_at = read_time(j.at("created_at"), "created_at");
    r.reporting_entity = j.at("reporting_entity").get<std::string>();
    for (const auto& s : j.at("subjects")) {
      r.subjects.push_back({s.at("address").get<std::string>(), s.at("role").get<std::string>()});
    }
    r.flagged_tx = j.at("flagged_tx").get<std::string>();
    r.tx_refs = j.at("tx_refs").get<std::vector<std::string>>();
    r.trigger_alert_id = j.at("trigger_alert_id").get<std::string>();
    for (const auto& a : j.at("alert_summary")) {
      auto type = monitor::parse_alert_type(a.at("alert_type").get<std::string>());
      if (!type) throw Error(ErrorCode::MalformedValue, "alert_type");
      r.alert_summary.push_back({a.at("alert_id").get<std::string>(), *type, a.at("subject").get<std::string>(),
                                 a.at("score").get<int>(), a.at("evidence").get<std::string>()});
    }
    const json& f = j.at("findings");
    r.findings.focus_wallet = f.at("focus_wallet").get<std::string>();
    r.findings.counterparty = f.at("counterparty").get<std::string>();
    r.findings.trade_count_30d = f.at("trade_count_30d").get<std::size_t>();
    r.findings.value_min = read_money(f.at("value_min"), "value_min");
    r.findings.value_max = read_money(f.at("value_max"), "value_max");
    r.findings.alternation_count = f.at("alternation_count").get<int>();
    r.findings.wallet_age_days = f.at("wallet_age_days").get<long long>();
    r.findings.window_start = read_time(f.at("window_start"), "window_start");
    r.findings.window_end = read_time(f.at("window_end"), "window_end");
    r.risk_score = j.at("risk_score").get<int>();
    auto band = monitor::parse_risk_band(j.at("risk_band").get<std::string>());
    if (!band) throw Error(ErrorCode::MalformedValue, "risk_band");
    r.risk_band = *band;
    r.screening_clean = j.at("screening_clean").get<bool>();
    r.screening_summary = j.at("screening_summary").get<std::string>();
    r.narrative = j.at("narrative").get<std::string>();
    r.recommendation = j.at("recommendation").get<std::string>();
    r.regulatory_basis = j.at("regulatory_basis").get<std::string>();
    r.audit_refs = j.at("audit_refs").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedValue, e.what());
  }
  return r;
}

StrReport draft_str(const orchestrate::CaseRecord& record, const DraftOptions& options) {
  if (record.state != orchestrate::CaseState::Escalated || !record.disposition ||
      record.disposition->outcome != investigate::Outcome::Escalate) {
    throw Error(ErrorCode::NotEscalated, record.case_id);
  }
  if (!record.disposition->str_recommended) throw Error(ErrorCode::NotRecommended, record.case_id);

  const auto& ctx = record.context;
  StrReport r;
  r.report_id = options.report_id;
  r.case_id = record.case_id;
  r.created_at = options.created_at;
  r.reporting_entity = options.reporting_entity;
  r.regulatory_basis = options.regulatory_basis;
  r.audit_refs = options.audit_refs;
  r.subjects = ctx.subjects;
  r.flagged_tx = ctx.flagged_tx;
  r.tx_refs = ctx.tx_refs;
  r.findings = ctx.behavior;
  r.risk_score = ctx.risk.score;
  r.risk_band = ctx.risk.band;

  std::vector<const monitor::Alert*> alerts;
  for (const auto& a : ctx.alerts) alerts.push_back(&a);
  std::stable_sort(alerts.begin(), alerts.end(), [](const monitor::Alert* a, const monitor::Alert* b) {
    return a->raised_at < b->raised_at;
  });
  for (const auto* a : alerts) r.alert_summary.push_back({a->alert_id, a->type, a->subject, a->score, a->evidence});
  r.trigger_alert_id = r.alert_summary.front().alert_id;

  std::vector<std::string> issues;
  for (const auto& s : ctx.screening) {
    if (s.sanctions_hit) issues.push_back(s.address + " is on the sanctions list");
    if (s.high_risk_jurisdiction) issues.push_back(s.address + " is linked to a high-risk jurisdiction");
  }
  r.screening_clean = issues.empty();
  if (r.screening_clean) {
    r.screening_summary = "No sanctions or high-risk jurisdiction issues were found.";
  } else {
    r.screening_summary = "Screening issues: ";
    for (std::size_t i = 0; i < issues.size(); ++i) r.screening_summary += (i ? "; " : "") + issues[i];
    r.screening_summary += ".";
  }
  r.recommendation = recommendation_for(r);
  r.narrative = render_narrative(r);
  return r;
}

std::string render_narrative(const StrReport& r) {
  std::string out;

  // 1. Flagged transaction and parties.
  out += "Transaction " + r.flagged_tx + " was flagged. Parties:";
  for (std::size_t i = 0; i < r.subjects.size(); ++i) {
    out += (i ? ", " : " ") + r.subjects[i].address + " (" + r.subjects[i].role + ")";
  }
  out += ".";

  // 2. Triggering alert.
  const AlertSummary* trigger = nullptr;
  for (const auto& a : r.alert_summary) {
    if (a.alert_id == r.trigger_alert_id) trigger = &a;
  }
  if (trigger != nullptr) {
    out += " Triggering alert: " + std::string(monitor::display_name(trigger->type)) + " on the " +
           role_of(r, trigger->subject) + " wallet, with a score of " + std::to_string(trigger->score) + ".";
  }

  // 3. Investigation findings.
  const auto& f = r.findings;
  out += " Findings: the " + role_of(r, f.focus_wallet) + " wallet made " + std::to_string(f.trade_count_30d) +
         " trades between " + date_of(f.window_start) + " and " + date_of(f.window_end);
  if (!f.counterparty.empty() && f.alternation_count > 0) {
    out += ", switching direction " + std::to_string(f.alternation_count) + " times with the " +
           role_of(r, f.counterparty) + " wallet";
  }
  out += ", at values from " + money(f.value_min) + " to " + money(f.value_max) + ". The wallet was " +
         std::to_string(f.wallet_age_days) + " days old at the latest case transaction.";
  std::set<monitor::AlertType> seen;
  std::string others;
  if (trigger != nullptr) seen.insert(trigger->type);
  for (const auto& a : r.alert_summary) {
    if (!seen.insert(a.type).second) continue;
    others += (others.empty() ? "" : ", ") + std::string(monitor::display_name(a.type)) + " (" +
              std::to_string(a.score) + ")";
  }
  if (!others.empty()) out += " Further alerts in the case: " + others + ".";

  // 4. Risk statement.
  out += " Overall risk: " + std::string(monitor::band_words(r.risk_band)) + " (" + std::to_string(r.risk_score) + ").";

  // 5. Screening outcome.
  out += " " + r.screening_summary;

  // 6. Report status and recommendation.
  out += " This STR (" + r.regulatory_basis + ") is ready for submission once an analyst approves it.";
  out += " Recommendation: " + r.recommendation;
  return out;
}

std::vector<std::string> validate_report(const StrReport& r, const ValidationContext& context) {
  std::vector<std::string> v;
  if (r.narrative.empty()) v.emplace_back("empty narrative");
  if (r.recommendation.empty()) v.emplace_back("empty recommendation");
  if (r.subjects.empty()) v.emplace_back("no subjects");
  if (r.alert_summary.empty()) v.emplace_back("no alerts");
  if (r.tx_refs.empty()) v.emplace_back("no tx_refs");

  std::map<monitor::AlertType, int> by_type;
  for (const auto& a : r.alert_summary) by_type.emplace(a.type, a.score);
  int total = 0;
  for (const auto& [type, score] : by_type) total += score;
  if (std::min(100, total) != r.risk_score) v.emplace_back("score not re-derivable");
  if (r.risk_score < 0 || r.risk_score > 100) {
    v.emplace_back("score out of range");
  } else if (monitor::risk_band(r.risk_score) != r.risk_band) {
    v.emplace_back("band mismatch");
  }

  if (std::find(r.tx_refs.begin(), r.tx_refs.end(), r.flagged_tx) == r.tx_refs.end()) {
    v.emplace_back("flagged tx not in tx_refs");
  }
  if (context.tx_known) {
    for (const auto& tx : r.tx_refs) {
      if (!context.tx_known(tx)) v.emplace_back("unknown tx_ref " + tx);
    }
  }
  if (context.audit_known) {
    for (auto seq : r.audit_refs) {
      if (!context.audit_known(seq)) v.emplace_back("unresolved audit_ref " + std::to_string(seq));
    }
  }
  return v;
}

}  // namespace fcc::report
