#include "fcc/service/compliance_service.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <future>
#include <sstream>

#include "fcc/monitor/evaluation.hpp"

namespace fcc::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json registry_line(const screening::RegistryEntry& e) {
  json j = {{"address", e.address}, {"first_seen", format_rfc3339(e.first_seen)}};
  if (e.jurisdiction) j["jurisdiction"] = *e.jurisdiction;
  return j;
}

std::vector<screening::RegistryEntry> registry_of(const json& lines) {
  std::stringstream in;
  for (const auto& l : lines) in << l.dump() << '\n';
  return screening::read_wallet_registry(in);
}

std::vector<ingest::TradeEvent> events_of(const json& lines) {
  std::vector<ingest::TradeEvent> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(ingest::parse_trade_event(l.get<std::string>()));
  return out;
}

Timestamp at_of(const json& command) {
  auto ts = parse_rfc3339(command.at("at").get<std::string>());
  if (!ts) throw Error(ErrorCode::MalformedValue, "at");
  return *ts;
}

json escalation_json(const orchestrate::HandoverRequest& h, const orchestrate::CaseRecord& c) {
  json types = json::array();
  std::set<std::string> seen;
  for (const auto& a : c.context.alerts) seen.insert(std::string(monitor::to_string(a.type)));
  for (const auto& t : seen) types.push_back(t);
  return {
      {"escalation_id", h.handover_id},
      {"case_id", c.case_id},
      {"state", orchestrate::to_string(c.state)},
      {"risk_score", c.context.risk.score},
      {"band", monitor::to_string(c.context.risk.band)},
      {"alert_types", types},
      {"created_at", format_rfc3339(h.created_at)},
      {"reason", h.reason},
      {"report_id", c.report_id ? json(*c.report_id) : json()},
  };
}

}  // namespace

// ---- CommandQueue ---------------------------------------------------------

CommandQueue::CommandQueue() : worker_([this] { loop(); }) {}

CommandQueue::~CommandQueue() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  ready_.notify_all();
  worker_.join();
}

void CommandQueue::run(std::function<void()> job) {
  std::packaged_task<void()> task(std::move(job));
  std::future<void> done = task.get_future();
  {
    std::lock_guard lock(mutex_);
    jobs_.emplace_back([&task] { task(); });
  }
  ready_.notify_one();
  done.get();
}

void CommandQueue::loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mutex_);
      ready_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
      if (jobs_.empty()) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
    }
    job();
  }
}

// ---- ComplianceService ----------------------------------------------------

ComplianceService::ComplianceService(ServiceConfig config)
    : config_(std::move(config)),
      engine_(std::make_unique<orchestrate::Engine>(config_.engine)),
      archive_(config_.data_dir / "reports") {
  fs::create_directories(outbox_dir());
  fs::create_directories(config_.data_dir / "labels");

  if (fs::exists(audit_path())) {
    if (auto violation = audit::verify_file(audit_path())) {
      throw Error(ErrorCode::ChainBroken, fmt::format("{} at line {} ({})", audit_path().string(), violation->seq,
                                                      audit::to_string(violation->kind)));
    }
  }

  if (fs::exists(journal_path())) {
    std::ifstream in(journal_path());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty()) continue;
      json command;
      try {
        command = json::parse(line);
      } catch (const json::exception&) {
        throw Error(ErrorCode::ChainBroken, fmt::format("journal line {} is not readable", number));
      }
      const std::string id = command.at("request_id").get<std::string>();
      if (id.rfind("auto-", 0) == 0) generated_ids_ = std::max(generated_ids_, std::stoul(id.substr(5)));
      Outcome outcome;
      try {
        outcome.body = apply(command);
      } catch (const Error& e) {
        outcome.error = e;
      }
      outcomes_.emplace(id, std::move(outcome));
    }
  }

  // The persisted log must be a prefix of the replayed one.
  engine_->audit().attach_file(audit_path());

  {
    std::ofstream rewrite(config_.data_dir / "events.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& e : engine_->store().events()) rewrite << ingest::serialize_trade_event(e) << '\n';
  }
  events_.open(config_.data_dir / "events.jsonl", std::ios::binary | std::ios::app);
  journal_.open(journal_path(), std::ios::binary | std::ios::app);
  if (!journal_ || !events_) throw Error(ErrorCode::IoError, config_.data_dir.string());

  // Files lost after a crash are rewritten from replayed state.
  for (const auto& [id, r] : engine_->reports()) archive_.store(r);
  for (const auto& [id, c] : engine_->cases()) {
    if (c.state == orchestrate::CaseState::Submitted && c.report_id) archive_.submit(*c.report_id, outbox_dir());
  }
  attach_hooks();

  if (!config_.wallet_registry.empty() && !outcomes_.contains("startup-registry") && outcomes_.empty()) {
    json lines = json::array();
    for (const auto& e : screening::read_wallet_registry_file(config_.wallet_registry)) lines.push_back(registry_line(e));
    submit({{"kind", "seed"}, {"request_id", "startup-registry"}, {"entries", lines}});
  }
}

void ComplianceService::attach_hooks() {
  engine_->on_report_drafted = [this](const report::StrReport& r) { archive_.store(r); };
  engine_->on_report_submitted = [this](const report::StrReport& r) { archive_.submit(r.report_id, outbox_dir()); };
}

std::string ComplianceService::assign_id(const std::string& request_id) {
  if (!request_id.empty()) return request_id;
  return fmt::format("auto-{:06}", ++generated_ids_);
}

json ComplianceService::submit(json command) {
  json result;
  queue_.run([&] {
    std::unique_lock lock(state_mutex_);
    const std::string id = assign_id(command.value("request_id", ""));
    command["request_id"] = id;
    if (auto it = outcomes_.find(id); it != outcomes_.end()) {
      if (it->second.error) throw *it->second.error;
      result = it->second.body;
      return;
    }
    journal_ << command.dump() << '\n';
    journal_.flush();
    if (!journal_) throw Error(ErrorCode::IoError, journal_path().string());
    const std::size_t events_before = engine_->store().size();
    Outcome outcome;
    try {
      outcome.body = apply(command);
    } catch (const Error& e) {
      outcome.error = e;
    }
    const auto& events = engine_->store().events();
    for (std::size_t i = events_before; i < events.size(); ++i) events_ << ingest::serialize_trade_event(events[i]) << '\n';
    events_.flush();
    auto [it, inserted] = outcomes_.emplace(id, std::move(outcome));
    if (it->second.error) throw *it->second.error;
    result = it->second.body;
  });
  return result;
}

json ComplianceService::apply(const json& command) {
  const std::string kind = command.at("kind").get<std::string>();
  const std::string id = command.at("request_id").get<std::string>();
  auto& engine = *engine_;
  try {
    if (kind == "seed") {
      const auto entries = registry_of(command.at("entries"));
      engine.seed_wallets(entries, id);
      return {{"request_id", id}, {"seeded", entries.size()}};
    }
    if (kind == "batch") {
      const auto events = events_of(command.at("events"));
      auto summary = engine.run_pipeline(events, id);
      json body = summary.to_json();
      body["request_id"] = id;
      return body;
    }
    if (kind == "generate") {
      const auto generator = ingest::GeneratorConfig::from_json(command.at("config"));
      const ingest::SyntheticStream stream = ingest::generate_synthetic(generator);
      std::size_t suspicious = 0;
      {
        std::ofstream labels(config_.data_dir / "labels" / (id + ".jsonl"), std::ios::binary | std::ios::trunc);
        for (const auto& l : stream.labels) {
          labels << ingest::serialize_label(l) << '\n';
          suspicious += l.suspicious ? 1 : 0;
        }
      }
      auto summary = engine.run_pipeline(stream.events, id);
      return {{"request_id", id},
              {"summary", summary.to_json()},
              {"transactions", stream.events.size()},
              {"suspicious_transactions", suspicious},
              {"labels_file", (fs::path("labels") / (id + ".jsonl")).string()}};
    }
    if (kind == "decision") {
      const auto& c = engine.decide(command.at("escalation_id").get<std::string>(),
                                    command.at("decision").get<std::string>(),
                                    command.at("rationale").get<std::string>(),
                                    command.at("analyst").get<std::string>(), at_of(command), id);
      json body = c.summary_json();
      body["request_id"] = id;
      return body;
    }
    if (kind == "feedback") {
      auto label = investigate::parse_analyst_label(command.at("label").get<std::string>());
      if (!label) throw Error(ErrorCode::MalformedValue, "label");
      auto fb = engine.record_feedback(command.at("case_id").get<std::string>(), *label, at_of(command), id);
      json body = fb.to_json();
      body["request_id"] = id;
      return body;
    }
    if (kind == "calibrate") {
      json body = engine.calibrate(at_of(command), id).to_json();
      body["request_id"] = id;
      return body;
    }
    if (kind == "model_score") {
      json body = engine.score_model(command.at("profile_id").get<std::string>(), command.at("pass").get<bool>(),
                                     at_of(command), id)
                      .to_json();
      body["request_id"] = id;
      return body;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedValue, e.what());
  }
  throw Error(ErrorCode::MalformedValue, "command kind " + kind);
}

json ComplianceService::ingest(const std::vector<ingest::TradeEvent>& events, const std::string& request_id) {
  json lines = json::array();
  for (const auto& e : events) lines.push_back(ingest::serialize_trade_event(e));
  return submit({{"kind", "batch"}, {"request_id", request_id}, {"events", std::move(lines)}});
}

json ComplianceService::generate(const ingest::GeneratorConfig& generator, const std::string& request_id) {
  if (!config_.dev_mode) throw Error(ErrorCode::InvalidConfig, "generate is only available in dev_mode");
  generator.validate();
  return submit({{"kind", "generate"}, {"request_id", request_id}, {"config", generator.to_json()}});
}

json ComplianceService::decide(const std::string& handover_id, const std::string& decision,
                               const std::string& rationale, const std::string& analyst,
                               const std::string& request_id) {
  return submit({{"kind", "decision"},
                 {"request_id", request_id},
                 {"escalation_id", handover_id},
                 {"decision", decision},
                 {"rationale", rationale},
                 {"analyst", analyst},
                 {"at", format_rfc3339(now_utc())}});
}

json ComplianceService::record_feedback(const std::string& case_id, investigate::AnalystLabel label,
                                        const std::string& request_id) {
  return submit({{"kind", "feedback"},
                 {"request_id", request_id},
                 {"case_id", case_id},
                 {"label", investigate::to_string(label)},
                 {"at", format_rfc3339(now_utc())}});
}

json ComplianceService::calibrate(const std::string& request_id) {
  return submit({{"kind", "calibrate"}, {"request_id", request_id}, {"at", format_rfc3339(now_utc())}});
}

json ComplianceService::score_model(const std::string& profile_id, bool pass, const std::string& request_id) {
  return submit({{"kind", "model_score"},
                 {"request_id", request_id},
                 {"profile_id", profile_id},
                 {"pass", pass},
                 {"at", format_rfc3339(now_utc())}});
}

// ---- reads ----------------------------------------------------------------

json ComplianceService::alerts(const std::optional<std::string>& wallet, const std::optional<std::string>& type) const {
  std::optional<monitor::AlertType> wanted;
  if (type) {
    wanted = monitor::parse_alert_type(*type);
    if (!wanted) throw Error(ErrorCode::MalformedValue, "type");
  }
  std::shared_lock lock(state_mutex_);
  json out = json::array();
  for (const auto& a : engine_->monitor().alerts()) {
    if (wallet && a.subject != *wallet) continue;
    if (wanted && a.type != *wanted) continue;
    out.push_back(monitor::to_json(a));
  }
  return out;
}

json ComplianceService::cases(const std::optional<std::string>& state) const {
  std::optional<orchestrate::CaseState> wanted;
  if (state) {
    wanted = orchestrate::parse_case_state(*state);
    if (!wanted) throw Error(ErrorCode::MalformedValue, "state");
  }
  std::shared_lock lock(state_mutex_);
  json out = json::array();
  for (const auto& [id, c] : engine_->cases()) {
    if (!wanted || c.state == *wanted) out.push_back(c.summary_json());
  }
  return out;
}

json ComplianceService::case_detail(const std::string& case_id) const {
  std::shared_lock lock(state_mutex_);
  const auto* c = engine_->find_case(case_id);
  if (c == nullptr) throw Error(ErrorCode::UnknownCase, case_id);
  json handovers = json::array();
  for (const auto& [id, h] : engine_->handovers()) {
    if (h.case_id == case_id) handovers.push_back(h.to_json());
  }
  audit::AuditFilter filter;
  filter.case_id = case_id;
  json timeline = json::array();
  for (const auto& r : engine_->audit().query(filter)) timeline.push_back(audit_record_json(r));
  const report::StrReport* r = c->report_id ? engine_->find_report(*c->report_id) : nullptr;
  return {
      {"case", c->to_json()},
      {"report", r != nullptr ? r->to_json() : json()},
      {"narrative", r != nullptr ? json(r->narrative) : json()},
      {"screening_summary", r != nullptr ? json(r->screening_summary) : json()},
      {"handovers", handovers},
      {"audit", timeline},
  };
}

json ComplianceService::escalations() const {
  std::shared_lock lock(state_mutex_);
  std::vector<json> items;
  for (const auto* h : engine_->pending_escalations()) {
    items.push_back(escalation_json(*h, *engine_->find_case(h->case_id)));
  }
  std::stable_sort(items.begin(), items.end(), [](const json& a, const json& b) {
    if (a["risk_score"] != b["risk_score"]) return a["risk_score"].get<int>() > b["risk_score"].get<int>();
    return a["created_at"].get<std::string>() < b["created_at"].get<std::string>();
  });
  return json(items);
}

json ComplianceService::report_json(const std::string& report_id) const {
  std::shared_lock lock(state_mutex_);
  const auto* r = engine_->find_report(report_id);
  if (r == nullptr) throw Error(ErrorCode::NotFound, report_id);
  return r->to_json();
}

std::string ComplianceService::report_text(const std::string& report_id) const {
  std::shared_lock lock(state_mutex_);
  const auto* r = engine_->find_report(report_id);
  if (r == nullptr) throw Error(ErrorCode::NotFound, report_id);
  return r->narrative;
}

json ComplianceService::audit(const audit::AuditFilter& filter) const {
  std::shared_lock lock(state_mutex_);
  json out = json::array();
  for (const auto& r : engine_->audit().query(filter)) out.push_back(audit_record_json(r));
  return out;
}

json ComplianceService::audit_verify() const {
  std::shared_lock lock(state_mutex_);
  std::optional<audit::ChainViolation> v = engine_->audit().verify();
  if (!v) v = audit::verify_file(audit_path());
  json body = {{"ok", !v.has_value()}, {"records", engine_->audit().size()}, {"head", engine_->audit().head_hash()}};
  if (v) body["violation"] = {{"seq", v->seq}, {"kind", audit::to_string(v->kind)}};
  return body;
}

json ComplianceService::metrics() const {
  std::shared_lock lock(state_mutex_);
  const auto& e = *engine_;
  json by_state = json::object();
  for (const auto& [id, c] : e.cases()) by_state[std::string(orchestrate::to_string(c.state))] = by_state.value(std::string(orchestrate::to_string(c.state)), 0) + 1;
  json by_type = json::object();
  for (const auto& a : e.monitor().alerts()) {
    const std::string t(monitor::to_string(a.type));
    by_type[t] = by_type.value(t, 0) + 1;
  }
  std::size_t hits = 0;
  for (const auto& [key, entry] : e.cache().entries()) hits += entry.hit_count;
  return {
      {"theta", e.optimizer().theta},
      {"feedback",
       {{"total", e.feedback().size()},
        {"CONFIRMED_SUSPICIOUS", e.feedback().count(investigate::AnalystLabel::ConfirmedSuspicious)},
        {"FALSE_POSITIVE", e.feedback().count(investigate::AnalystLabel::FalsePositive)}}},
      {"events", e.store().size()},
      {"alerts", e.monitor().alerts().size()},
      {"alerts_by_type", by_type},
      {"cases", e.cases().size()},
      {"cases_by_state", by_state},
      {"pending_escalations", e.pending_escalations().size()},
      {"reports", e.reports().size()},
      {"cache_entries", e.cache().size()},
      {"cache_hits", hits},
      {"audit_records", e.audit().size()},
      {"cost_report", compute_cost_report(config_.cost_defaults).to_json()},
  };
}

json ComplianceService::models() const {
  std::shared_lock lock(state_mutex_);
  return {{"baseline", engine_->registry().baseline().to_string()}, {"profiles", engine_->registry().to_json()}};
}

json ComplianceService::optimizer() const {
  std::shared_lock lock(state_mutex_);
  return engine_->optimizer().to_json();
}

json ComplianceService::cost_report(const std::map<std::string, std::string>& params) const {
  CostModelParams p = CostModelParams::from_strings(params, config_.cost_defaults);
  json body = compute_cost_report(p).to_json();
  body["params"] = p.to_json();
  return body;
}

// ---- helpers --------------------------------------------------------------

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownCase:
    case ErrorCode::UnknownEscalation:
    case ErrorCode::UnknownProfile:
    case ErrorCode::UnknownAgent:
      return 404;
    case ErrorCode::NotPending:
    case ErrorCode::DuplicateFeedback:
    case ErrorCode::NotEscalated:
    case ErrorCode::NotRecommended:
    case ErrorCode::IllegalTransition:
    case ErrorCode::ArchiveConflict:
    case ErrorCode::OutOfOrderBatch:
    case ErrorCode::FallbackImmutable:
      return 409;
    case ErrorCode::ChainBroken:
    case ErrorCode::IoError:
      return 500;
    default:
      return 400;
  }
}

json error_body(const Error& error) { return {{"code", to_string(error.code())}, {"message", error.detail()}}; }

json audit_record_json(const audit::AuditRecord& record) { return json::parse(audit::serialize_record(record)); }

}  // namespace fcc::service
