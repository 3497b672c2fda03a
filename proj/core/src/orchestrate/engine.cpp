#include "fcc/orchestrate/engine.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "fcc/common/error.hpp"
#include "fcc/investigate/investigator.hpp"
#include "fcc/report/archive.hpp"

namespace fcc::orchestrate {

using investigate::AnalystLabel;
using monitor::Alert;

namespace {

std::string suffix(const std::string& request_id) {
  return request_id.empty() ? std::string() : " [request " + request_id + "]";
}

std::string verdict_note(const GuardrailDecision& d) { return " Guardrail: " + d.to_string() + "."; }

bool escalated_once(CaseState s) {
  return s == CaseState::Escalated || s == CaseState::StrDrafted || s == CaseState::PendingReview ||
         s == CaseState::Submitted || s == CaseState::Rejected;
}

std::string alert_list(std::span<const Alert> alerts) {
  std::string out;
  for (const auto& a : alerts) {
    if (!out.empty()) out += "; ";
    out += a.alert_id + " " + std::string(monitor::to_string(a.type)) + " on " + a.subject;
  }
  return out;
}

}  // namespace

struct Engine::CaseRun {
  CaseRecord* rec = nullptr;
  std::string case_id;
  Timestamp at{};
  std::string request_id;
  monitor::RiskBand band = monitor::RiskBand::Low;
  PipelineSummary* summary = nullptr;
};

void EngineConfig::validate() const {
  ruleset.validate();
  optimizer.validate();
  policies.validate();
  if (compliance_baseline.is_negative() || compliance_baseline > Decimal::from_int(1)) {
    throw Error(ErrorCode::InvalidConfig, "compliance_baseline");
  }
  if (investigate_task.min_explainability < 1 || investigate_task.min_explainability > 5) {
    throw Error(ErrorCode::InvalidConfig, "routing.min_explainability");
  }
}

nlohmann::json PipelineSummary::to_json() const {
  nlohmann::json range;
  if (audit_seq_range) range = {audit_seq_range->first, audit_seq_range->second};
  return {
      {"accepted", accepted},         {"rejected", rejected},         {"first_seen_wallets", first_seen_wallets},
      {"alerts", alerts},             {"cases_opened", cases_opened}, {"auto_closed", auto_closed},
      {"escalated", escalated},       {"strs_drafted", strs_drafted}, {"blocked", blocked},
      {"audit_seq_range", range},
  };
}

Engine::Engine(EngineConfig config)
    : config_(std::move(config)),
      monitor_(config_.ruleset, config_.lists),
      optimizer_(config_.optimizer),
      registry_(config_.models, config_.compliance_baseline) {
  config_.validate();
}

const CaseRecord* Engine::find_case(const std::string& case_id) const {
  auto it = cases_.find(case_id);
  return it == cases_.end() ? nullptr : &it->second;
}

const HandoverRequest* Engine::find_handover(const std::string& handover_id) const {
  auto it = handovers_.find(handover_id);
  return it == handovers_.end() ? nullptr : &it->second;
}

const report::StrReport* Engine::find_report(const std::string& report_id) const {
  auto it = reports_.find(report_id);
  return it == reports_.end() ? nullptr : &it->second;
}

std::vector<const HandoverRequest*> Engine::pending_escalations() const {
  std::vector<const HandoverRequest*> out;
  for (const auto& [id, h] : handovers_) {
    if (h.to_human() && !h.acknowledged) out.push_back(&h);
  }
  return out;
}

investigate::ExclusionCheck Engine::exclusion() const {
  return [this](const std::string& id) { return registry_.is_excluded(id); };
}

const audit::AuditRecord& Engine::record(AgentId agent, std::string_view action_name, std::string rationale,
                                         Timestamp at, const std::optional<std::string>& case_id,
                                         const std::optional<std::string>& tx_id, std::string_view input,
                                         const std::string& request_id) {
  audit::AuditEntry e;
  e.timestamp = at;
  e.agent = AgentIdentity{agent};
  e.action = std::string(action_name);
  e.case_id = case_id;
  e.tx_id = tx_id;
  e.rationale = std::move(rationale) + suffix(request_id);
  e.input_digest = audit::digest_of(input);
  return audit_.append(std::move(e));
}

// Records a BLOCK; otherwise leaves recording to the action itself.
GuardrailDecision Engine::guard(CaseRun& run, AgentId agent, std::string_view action_name) {
  GuardrailDecision d = enforce_guardrail(agent, action_name, run.band, config_.policies);
  if (d.verdict == Verdict::Block) {
    const std::string state = run.rec != nullptr ? std::string(to_string(run.rec->state)) : "(not opened)";
    record(agent, "GUARDRAIL_BLOCK",
           d.to_string() + ": " + std::string(action_name) + " refused; case parked in " + state + ".", run.at,
           run.case_id, std::nullopt, action_name, run.request_id);
    if (run.summary != nullptr) ++run.summary->blocked;
  }
  return d;
}

bool Engine::transition(CaseRun& run, CaseEvent event, std::string why) {
  CaseRecord& c = *run.rec;
  const bool human_event = event == CaseEvent::AnalystConfirm || event == CaseEvent::AnalystDismiss;
  GuardrailDecision g;
  if (!human_event) {
    g = guard(run, AgentId::Orchestrator, action::kTransition);
    if (g.verdict == Verdict::Block) return false;
  }
  if (event != CaseEvent::HandoverCreated && !human_event) {
    auto open = unacked_.find(c.case_id);
    if (open != unacked_.end() && open->second > 0) {
      record(AgentId::Orchestrator, "GUARDRAIL_BLOCK",
             "BLOCK(unacknowledged handover): " + std::string(to_string(event)) + " refused; case parked in " +
                 std::string(to_string(c.state)) + ".",
             run.at, c.case_id, std::nullopt, to_string(event), run.request_id);
      if (run.summary != nullptr) ++run.summary->blocked;
      return false;
    }
  }
  const CaseState next = next_state(c.state, event);
  std::string rationale = std::string(to_string(c.state)) + " -> " + std::string(to_string(next)) + " on " +
                          std::string(to_string(event)) + ": " + why;
  if (!human_event) rationale += verdict_note(g);
  const auto& r = record(AgentId::Orchestrator, action::kTransition, std::move(rationale), run.at, c.case_id,
                         std::nullopt, to_string(event), run.request_id);
  c.state = next;
  c.history.push_back({next, run.at, r.seq});
  if (g.verdict == Verdict::RequireHandover) c.human_required = true;
  return true;
}

HandoverRequest& Engine::open_handover(CaseRun& run, AgentId from, std::string to, std::string reason,
                                       bool acknowledged) {
  HandoverRequest h;
  h.handover_id = fmt::format("HO-{:06}", next_handover_);
  h.from = AgentIdentity{from};
  h.to = std::move(to);
  h.case_id = run.case_id;
  h.reason = std::move(reason);
  h.payload_digest = audit::digest_of(run.rec->summary_json().dump());
  h.created_at = run.at;
  h.acknowledged = acknowledged;
  record(AgentId::Orchestrator, action::kHandover,
         "Handover " + h.handover_id + " from " + std::string(fcc::to_string(from)) + " to " + h.to + ": " + h.reason +
             (acknowledged ? " Acknowledged on receipt." : " Awaiting acknowledgement."),
         run.at, run.case_id, std::nullopt, h.payload_digest, run.request_id);
  ++next_handover_;
  if (!acknowledged) ++unacked_[h.case_id];
  auto [it, inserted] = handovers_.emplace(h.handover_id, std::move(h));
  return it->second;
}

void Engine::screen_once(const std::string& wallet, Timestamp at, const std::string& request_id) {
  if (screened_.contains(wallet)) return;
  GuardrailDecision g = enforce_guardrail(AgentId::Screening, action::kScreenWallet, std::nullopt, config_.policies);
  if (g.verdict == Verdict::Block) {
    record(AgentId::Screening, "GUARDRAIL_BLOCK", g.to_string() + ": SCREEN_WALLET refused for " + wallet + ".", at,
           std::nullopt, std::nullopt, wallet, request_id);
    return;
  }
  const screening::ScreeningResult result = monitor_.screen(wallet);
  record(AgentId::Screening, action::kScreenWallet, result.rationale + verdict_note(g), at, std::nullopt,
         std::nullopt, wallet, request_id);
  screened_.insert(wallet);
}

void Engine::seed_wallets(std::span<const screening::RegistryEntry> entries, const std::string& request_id) {
  for (const auto& entry : entries) {
    store_.seed_wallet(entry.address, entry.first_seen);
    monitor_.seed_wallet(entry);
    screen_once(entry.address, entry.first_seen, request_id);
  }
}

PipelineSummary Engine::run_pipeline(std::span<const ingest::TradeEvent> batch, const std::string& request_id) {
  PipelineSummary s;
  if (batch.empty()) return s;

  // Refuse out-of-order input before anything is written.
  std::optional<Timestamp> last = store_.last_timestamp();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (last && batch[i].timestamp < *last) throw Error(ErrorCode::OutOfOrderBatch, std::to_string(i));
    last = batch[i].timestamp;
  }

  const std::uint64_t first_seq = audit_.next_seq();
  const Timestamp batch_end = batch.back().timestamp;

  GuardrailDecision g = enforce_guardrail(AgentId::Ingest, action::kIngestBatch, std::nullopt, config_.policies);
  if (g.verdict == Verdict::Block) {
    record(AgentId::Ingest, "GUARDRAIL_BLOCK", g.to_string() + ": INGEST_BATCH refused.", batch_end, std::nullopt,
           std::nullopt, "", request_id);
    s.blocked = 1;
    s.audit_seq_range = {{first_seq, first_seq}};
    return s;
  }

  std::vector<std::size_t> accepted;
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> fresh_wallets;
  std::string payload;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    payload += ingest::serialize_trade_event(batch[i]);
    payload += '\n';
    if (store_.find(batch[i].tx_id) != nullptr || !seen.insert(batch[i].tx_id).second) continue;
    accepted.push_back(i);
    for (const auto* w : {&batch[i].seller, &batch[i].buyer}) {
      if (!store_.first_seen(*w)) fresh_wallets.insert(*w);
    }
  }
  record(AgentId::Ingest, action::kIngestBatch,
         fmt::format("Accepted {} of {} events ({} duplicates rejected); {} wallets seen for the first time.",
                     accepted.size(), batch.size(), batch.size() - accepted.size(), fresh_wallets.size()) +
             verdict_note(g),
         batch_end, std::nullopt, std::nullopt, payload, request_id);
  const ingest::IngestSummary ingested = store_.ingest_batch(batch);
  s.accepted = ingested.accepted;
  s.rejected = ingested.rejected;
  s.first_seen_wallets = ingested.first_seen_wallets;

  std::vector<Alert> raised;
  for (std::size_t i : accepted) {
    const ingest::TradeEvent& e = batch[i];
    for (const auto* w : {&e.seller, &e.buyer}) {
      if (!monitor_.has_traded(*w)) screen_once(*w, e.timestamp, request_id);
    }
    GuardrailDecision m =
        enforce_guardrail(AgentId::Monitoring, action::kEvaluateTrade, std::nullopt, config_.policies);
    if (m.verdict == Verdict::Block) {
      record(AgentId::Monitoring, "GUARDRAIL_BLOCK", m.to_string() + ": EVALUATE_TRADE refused.", e.timestamp,
             std::nullopt, e.tx_id, e.tx_id, request_id);
      ++s.blocked;
      continue;
    }
    monitor::TradeEvaluation eval = monitor_.evaluate_trade(e);
    std::string rationale =
        eval.alerts.empty() ? std::string("No rule fired.") : "Raised " + alert_list(eval.alerts) + ".";
    record(AgentId::Monitoring, action::kEvaluateTrade, rationale + verdict_note(m), e.timestamp, std::nullopt,
           e.tx_id, ingest::serialize_trade_event(e), request_id);
    raised.insert(raised.end(), eval.alerts.begin(), eval.alerts.end());
    monitor_.commit(e, std::move(eval));
  }
  s.alerts = raised.size();

  for (auto& group : group_alerts(raised, days(config_.ruleset.wash_window_days))) {
    process_case(std::move(group), s, request_id);
  }
  if (audit_.next_seq() > first_seq) s.audit_seq_range = {{first_seq, audit_.next_seq() - 1}};
  return s;
}

void Engine::process_case(std::vector<Alert> alerts, PipelineSummary& summary, const std::string& request_id) {
  const std::string case_id = fmt::format("CASE-{:06}", next_case_);
  investigate::CaseContext ctx = investigate::build_case_context(case_id, alerts, monitor_);

  CaseRun run;
  run.case_id = case_id;
  run.request_id = request_id;
  run.band = ctx.risk.band;
  run.summary = &summary;
  run.at = alerts.front().raised_at;
  for (const auto& a : alerts) run.at = std::max(run.at, a.raised_at);

  // Triage: open the case.
  GuardrailDecision g = guard(run, AgentId::Triage, action::kOpenCase);
  if (g.verdict == Verdict::Block) return;
  ++next_case_;
  std::set<std::string> types;
  for (const auto& a : ctx.alerts) types.insert(std::string(monitor::to_string(a.type)));
  std::string type_text;
  for (const auto& t : types) type_text += (type_text.empty() ? "" : ", ") + t;
  const auto& opened =
      record(AgentId::Triage, action::kOpenCase,
             fmt::format("Opened from {} alerts ({}) over {} transactions; risk {} ({}).", ctx.alerts.size(),
                         type_text, ctx.tx_refs.size(), ctx.risk.score, monitor::to_string(ctx.risk.band)) +
                 verdict_note(g),
             run.at, case_id, ctx.flagged_tx, investigate::to_json(ctx).dump(), request_id);
  CaseRecord fresh;
  fresh.case_id = case_id;
  fresh.context = std::move(ctx);
  fresh.history.push_back({CaseState::New, run.at, opened.seq});
  fresh.human_required = g.verdict == Verdict::RequireHandover;
  run.rec = &cases_.emplace(case_id, std::move(fresh)).first->second;
  CaseRecord& c = *run.rec;
  ++summary.cases_opened;

  if (!transition(run, CaseEvent::AlertsAggregated, "alerts aggregated and risk banded.")) return;

  g = guard(run, AgentId::Orchestrator, action::kHandover);
  if (g.verdict == Verdict::Block) return;
  open_handover(run, AgentId::Triage, std::string(fcc::to_string(AgentId::Investigation)),
                "triaged case is ready for investigation.", true);
  if (g.verdict == Verdict::RequireHandover) c.human_required = true;

  g = guard(run, AgentId::Orchestrator, action::kRoute);
  if (g.verdict == Verdict::Block) return;
  const ModelProfile& model = route_model(config_.investigate_task, registry_);
  record(AgentId::Orchestrator, action::kRoute,
         fmt::format("Routed {} to {} ({}, explainability {}).", to_string(config_.investigate_task.task_type),
                     model.profile_id, to_string(model.kind), model.explainability) +
             verdict_note(g),
         run.at, case_id, std::nullopt, config_.investigate_task.to_json().dump(), request_id);
  c.model_profile_id = model.profile_id;
  if (g.verdict == Verdict::RequireHandover) c.human_required = true;

  if (!transition(run, CaseEvent::StartInvestigation, "investigation started.")) return;

  // Investigation.
  GuardrailDecision read = guard(run, AgentId::Investigation, action::kReadCase);
  if (read.verdict == Verdict::Block) return;
  g = guard(run, AgentId::Investigation, action::kInvestigate);
  if (g.verdict == Verdict::Block) return;
  if (read.verdict == Verdict::RequireHandover || g.verdict == Verdict::RequireHandover) c.human_required = true;
  investigate::InvestigationPlan plan = investigate::plan_investigation(
      c.context, optimizer_, cache_, exclusion(), c.model_profile_id, run.at, config_.ruleset, c.human_required);
  record(AgentId::Investigation, action::kInvestigate,
         plan.disposition.rationale + " Source: " + std::string(to_string(plan.disposition.provenance)) + " (" +
             plan.key.to_string() + ")." + verdict_note(g),
         run.at, case_id, c.context.flagged_tx, plan.key.to_string(), request_id);
  c.disposition = plan.disposition;
  if (plan.cache_hit) {
    cache_.lookup(plan.key, exclusion());
  } else {
    g = guard(run, AgentId::Investigation, action::kCacheWrite);
    if (g.verdict == Verdict::Block) return;
    record(AgentId::Investigation, action::kCacheWrite,
           "Stored the disposition under " + plan.key.to_string() + " for " + c.model_profile_id + "." +
               verdict_note(g),
           run.at, case_id, std::nullopt, plan.entry->to_json().dump(), request_id);
    cache_.insert(std::move(*plan.entry));
  }

  const bool escalate = c.disposition->outcome == investigate::Outcome::Escalate;
  if (!transition(run, escalate ? CaseEvent::Escalate : CaseEvent::AutoClose,
                  escalate ? "disposition is ESCALATE." : "disposition is AUTO_CLOSE.")) {
    return;
  }
  if (!escalate) {
    ++summary.auto_closed;
    return;
  }
  ++summary.escalated;

  if (!c.disposition->str_recommended) {
    g = guard(run, AgentId::Orchestrator, action::kHandover);
    if (g.verdict == Verdict::Block) return;
    open_handover(run, AgentId::Orchestrator, std::string(kHuman),
                  "escalated case needs analyst review; no STR was recommended.", false);
    return;
  }

  // Reporting.
  g = guard(run, AgentId::Reporting, action::kDraftStr);
  if (g.verdict == Verdict::Block) return;
  report::DraftOptions options;
  options.report_id = fmt::format("STR-{:06}", next_report_);
  options.created_at = run.at;
  options.reporting_entity = config_.reporting_entity;
  audit::AuditFilter by_case;
  by_case.case_id = case_id;
  for (const auto& r : audit_.query(by_case)) options.audit_refs.push_back(r.seq);
  report::StrReport str = report::draft_str(c, options);
  record(AgentId::Reporting, action::kDraftStr,
         fmt::format("Drafted {} for risk {} ({}) over {} transactions; screening {}.", str.report_id, str.risk_score,
                     monitor::to_string(str.risk_band), str.tx_refs.size(),
                     str.screening_clean ? "clean" : "with findings") +
             verdict_note(g),
         run.at, case_id, str.flagged_tx, str.to_json().dump(), request_id);
  ++next_report_;
  if (on_report_drafted) on_report_drafted(str);
  c.report_id = str.report_id;
  const std::string report_id = str.report_id;
  reports_.emplace(report_id, std::move(str));
  ++summary.strs_drafted;
  if (g.verdict == Verdict::RequireHandover) c.human_required = true;

  if (!transition(run, CaseEvent::StrDrafted, report_id + " drafted.")) return;
  g = guard(run, AgentId::Orchestrator, action::kHandover);
  if (g.verdict == Verdict::Block) return;
  open_handover(run, AgentId::Reporting, std::string(kHuman),
                report_id + " needs an analyst decision before submission.", false);
  transition(run, CaseEvent::HandoverCreated, "awaiting analyst review.");
}

const CaseRecord& Engine::decide(const std::string& handover_id, const std::string& decision,
                                 const std::string& rationale, const std::string& analyst, Timestamp at,
                                 const std::string& request_id) {
  auto hit = handovers_.find(handover_id);
  if (hit == handovers_.end() || !hit->second.to_human()) throw Error(ErrorCode::UnknownEscalation, handover_id);
  if (decision != "confirm" && decision != "dismiss") throw Error(ErrorCode::MalformedValue, "decision");
  if (rationale.find_first_not_of(" \t\r\n") == std::string::npos) throw Error(ErrorCode::EmptyRationale, "rationale");
  if (analyst.empty()) throw Error(ErrorCode::MissingField, "analyst");
  HandoverRequest& h = hit->second;
  CaseRecord& c = cases_.at(h.case_id);
  if (h.acknowledged || c.state != CaseState::PendingReview) throw Error(ErrorCode::NotPending, handover_id);

  const bool confirm = decision == "confirm";
  CaseRun run;
  run.rec = &c;
  run.case_id = c.case_id;
  run.at = at;
  run.request_id = request_id;
  run.band = c.context.risk.band;

  record(AgentId::Orchestrator, action::kDecideCase,
         "Analyst " + analyst + " chose " + decision + " on " + handover_id + ": " + rationale, at, c.case_id,
         std::nullopt, decision + "\n" + rationale, request_id);
  h.acknowledged = true;
  h.decision = HumanDecision{decision, analyst, rationale, at};
  --unacked_[c.case_id];

  const bool label_new = !feedback_.contains(c.case_id);
  if (label_new) add_feedback(c, confirm ? AnalystLabel::ConfirmedSuspicious : AnalystLabel::FalsePositive, at,
                              request_id);
  transition(run, confirm ? CaseEvent::AnalystConfirm : CaseEvent::AnalystDismiss,
             "analyst " + analyst + " " + (confirm ? "confirmed" : "dismissed") + " the case.");
  if (confirm && c.report_id) {
    const report::StrReport& str = reports_.at(*c.report_id);
    record(AgentId::Reporting, action::kSubmitStr,
           "Submitted " + str.report_id + " to the FIU outbox on confirmation by " + analyst + " (" + handover_id +
               ").",
           at, c.case_id, str.flagged_tx, report::archive_text(str), request_id);
    if (on_report_submitted) on_report_submitted(str);
  }
  if (label_new) after_feedback(at, request_id);
  return c;
}

investigate::FeedbackRecord Engine::add_feedback(const CaseRecord& c, AnalystLabel label, Timestamp at,
                                                 const std::string& request_id) {
  investigate::FeedbackRecord fb;
  fb.case_id = c.case_id;
  fb.key = investigate::semantic_key(c.context, config_.ruleset);
  fb.case_score = c.context.risk.score;
  fb.analyst_label = label;
  fb.decided_at = at;
  record(AgentId::Investigation, "RECORD_FEEDBACK",
         fmt::format("{} for case score {} under {}.", to_string(label), fb.case_score, fb.key.to_string()), at,
         c.case_id, std::nullopt, fb.to_json().dump(), request_id);
  return feedback_.add(std::move(fb));
}

investigate::FeedbackRecord Engine::record_feedback(const std::string& case_id, AnalystLabel label, Timestamp at,
                                                    const std::string& request_id) {
  const CaseRecord* c = find_case(case_id);
  if (c == nullptr) throw Error(ErrorCode::UnknownCase, case_id);
  if (!escalated_once(c->state)) throw Error(ErrorCode::NotEscalated, case_id);
  if (feedback_.contains(case_id)) throw Error(ErrorCode::DuplicateFeedback, case_id);
  investigate::FeedbackRecord fb = add_feedback(*c, label, at, request_id);
  after_feedback(at, request_id);
  return fb;
}

void Engine::after_feedback(Timestamp at, const std::string& request_id) {
  const std::size_t every = optimizer_.auto_every;
  if (every > 0 && feedback_.size() % every == 0) calibrate(at, request_id);
}

investigate::ThresholdResult Engine::calibrate(Timestamp at, const std::string& request_id) {
  investigate::ThresholdResult result = investigate::optimize_threshold(feedback_.records(), optimizer_);
  record(AgentId::Investigation, "THRESHOLD_UPDATE",
         result.changed() ? fmt::format("theta {} -> {}; cost {} -> {} over {} feedback records.", result.theta_before,
                                        result.theta_after, result.cost_before.to_string(),
                                        result.cost_after.to_string(), result.records_used)
                          : fmt::format("theta stays {}; cost {} over {} feedback records.", result.theta_before,
                                        result.cost_before.to_string(), result.records_used),
         at, std::nullopt, std::nullopt, result.to_json().dump(), request_id);
  optimizer_.theta = result.theta_after;
  if (result.changed() && cache_.size() > 0) {
    record(AgentId::Investigation, "CACHE_INVALIDATE",
           fmt::format("Cleared {} cached dispositions made under the previous threshold.", cache_.size()), at,
           std::nullopt, std::nullopt, std::to_string(result.theta_after), request_id);
    cache_.clear();
  }
  return result;
}

const ModelProfile& Engine::score_model(const std::string& profile_id, bool pass, Timestamp at,
                                        const std::string& request_id) {
  const bool was_excluded = registry_.is_excluded(profile_id);
  const Decimal before = registry_.find(profile_id) != nullptr ? registry_.find(profile_id)->compliance_score : Decimal{};
  ModelProfile updated = update_model_score(profile_id, pass, registry_);
  record(AgentId::Orchestrator, "MODEL_SCORE",
         fmt::format("{} {}: compliance {} -> {}{}.", profile_id, pass ? "passed" : "failed", before.to_string(),
                     updated.compliance_score.to_string(), updated.excluded ? ", excluded" : ""),
         at, std::nullopt, std::nullopt, updated.to_json().dump(), request_id);
  registry_.put(updated);
  if (!was_excluded && updated.excluded) {
    std::size_t owned = 0;
    for (const auto& [key, entry] : cache_.entries()) owned += entry.model_profile_id == profile_id ? 1 : 0;
    if (owned > 0) {
      record(AgentId::Orchestrator, "CACHE_INVALIDATE",
             fmt::format("Dropped {} cached dispositions from excluded model {}.", owned, profile_id), at,
             std::nullopt, std::nullopt, profile_id, request_id);
      cache_.erase_model(profile_id);
    }
  }
  return *registry_.find(profile_id);
}

GuardrailDecision Engine::request_action(AgentId agent, const std::string& action_name, const std::string& case_id,
                                         Timestamp at, const std::string& request_id) {
  const CaseRecord* c = find_case(case_id);
  if (c == nullptr) throw Error(ErrorCode::UnknownCase, case_id);
  GuardrailDecision d = enforce_guardrail(agent, action_name, c->context.risk.band, config_.policies);
  record(agent, d.verdict == Verdict::Block ? "GUARDRAIL_BLOCK" : "GUARDRAIL_CHECK",
         d.to_string() + ": " + action_name + " requested on " + case_id + " in state " +
             std::string(to_string(c->state)) + ".",
         at, case_id, std::nullopt, action_name, request_id);
  return d;
}

nlohmann::json Engine::state_json() const {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& [id, c] : cases_) cases.push_back(c.to_json());
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& [id, r] : reports_) reports.push_back(r.to_json());
  nlohmann::json alerts = nlohmann::json::array();
  for (const auto& a : monitor_.alerts()) alerts.push_back(monitor::to_json(a));
  nlohmann::json feedback = nlohmann::json::array();
  for (const auto& f : feedback_.records()) feedback.push_back(f.to_json());
  return {
      {"events", store_.size()}, {"alerts", alerts},       {"cases", cases},
      {"reports", reports},      {"cache", cache_.to_json()}, {"feedback", feedback},
      {"optimizer", optimizer_.to_json()}, {"models", registry_.to_json()},
  };
}

std::string Engine::state_digest() const { return audit::digest_of(state_json().dump()); }

std::vector<std::vector<Alert>> group_alerts(std::span<const Alert> alerts, seconds window) {
  std::vector<std::size_t> parent(alerts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::string, std::size_t> last_by_key;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    std::set<std::string> keys(alerts[i].tx_refs.begin(), alerts[i].tx_refs.end());
    keys.insert(alerts[i].subject);
    for (const auto& key : keys) {
      auto [it, inserted] = last_by_key.emplace(key, i);
      if (!inserted) {
        const Alert& prev = alerts[it->second];
        if (alerts[i].raised_at - prev.raised_at <= window) {
          std::size_t a = find(it->second);
          std::size_t b = find(i);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
        it->second = i;
      }
    }
  }
  std::map<std::size_t, std::vector<Alert>> groups;  // keyed by root = smallest index
  for (std::size_t i = 0; i < alerts.size(); ++i) groups[find(i)].push_back(alerts[i]);
  std::vector<std::vector<Alert>> out;
  out.reserve(groups.size());
  for (auto& [root, group] : groups) out.push_back(std::move(group));
  return out;
}

}  // namespace fcc::orchestrate
