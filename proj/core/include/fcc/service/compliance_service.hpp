#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcc/audit/audit_log.hpp"
#include "fcc/common/error.hpp"
#include "fcc/ingest/generator.hpp"
#include "fcc/orchestrate/engine.hpp"
#include "fcc/report/archive.hpp"
#include "fcc/service/config.hpp"

namespace fcc::service {

/// Runs submitted jobs one at a time on a dedicated thread.
class CommandQueue {
 public:
  CommandQueue();
  ~CommandQueue();
  CommandQueue(const CommandQueue&) = delete;
  CommandQueue& operator=(const CommandQueue&) = delete;

  /// Blocks until `job` has run; rethrows its exception.
  void run(std::function<void()> job);

 private:
  void loop();

  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::thread worker_;
};

/// Event-sourced wrapper around the engine. Every mutation is journaled
/// before it runs and replayed on startup; a request id seen before returns
/// the recorded outcome without running again.
///
/// Data directory layout: journal.jsonl, audit.jsonl, events.jsonl,
/// reports/, outbox/, labels/.
class ComplianceService {
 public:
  /// Verifies the persisted audit log, replays the journal and checks the
  /// replayed log against the persisted one. Throws Error(ChainBroken).
  explicit ComplianceService(ServiceConfig config);
  ComplianceService(const ComplianceService&) = delete;
  ComplianceService& operator=(const ComplianceService&) = delete;

  // Mutations. An empty request id is replaced by a generated one.
  nlohmann::json ingest(const std::vector<ingest::TradeEvent>& events, const std::string& request_id);
  nlohmann::json generate(const ingest::GeneratorConfig& generator, const std::string& request_id);
  nlohmann::json decide(const std::string& handover_id, const std::string& decision, const std::string& rationale,
                        const std::string& analyst, const std::string& request_id);
  nlohmann::json record_feedback(const std::string& case_id, investigate::AnalystLabel label,
                                 const std::string& request_id);
  nlohmann::json calibrate(const std::string& request_id);
  nlohmann::json score_model(const std::string& profile_id, bool pass, const std::string& request_id);

  // Reads against a consistent snapshot.
  nlohmann::json alerts(const std::optional<std::string>& wallet, const std::optional<std::string>& type) const;
  nlohmann::json cases(const std::optional<std::string>& state) const;
  nlohmann::json case_detail(const std::string& case_id) const;
  nlohmann::json escalations() const;
  nlohmann::json report_json(const std::string& report_id) const;
  std::string report_text(const std::string& report_id) const;
  nlohmann::json audit(const audit::AuditFilter& filter) const;
  nlohmann::json audit_verify() const;
  nlohmann::json metrics() const;
  nlohmann::json models() const;
  nlohmann::json optimizer() const;
  nlohmann::json cost_report(const std::map<std::string, std::string>& params) const;

  /// Runs `fn` under the read lock.
  template <typename Fn>
  auto inspect(Fn&& fn) const {
    std::shared_lock lock(state_mutex_);
    return fn(*engine_);
  }

  const ServiceConfig& config() const { return config_; }
  std::filesystem::path journal_path() const { return config_.data_dir / "journal.jsonl"; }
  std::filesystem::path audit_path() const { return config_.data_dir / "audit.jsonl"; }
  std::filesystem::path outbox_dir() const { return config_.data_dir / "outbox"; }
  std::filesystem::path reports_dir() const { return config_.data_dir / "reports"; }

 private:
  struct Outcome {
    nlohmann::json body;
    std::optional<Error> error;
  };

  nlohmann::json submit(nlohmann::json command);
  nlohmann::json apply(const nlohmann::json& command);
  std::string assign_id(const std::string& request_id);
  void attach_hooks();

  ServiceConfig config_;
  std::unique_ptr<orchestrate::Engine> engine_;
  report::ReportArchive archive_;
  mutable std::shared_mutex state_mutex_;
  std::map<std::string, Outcome> outcomes_;
  std::size_t generated_ids_ = 0;
  std::ofstream journal_;
  std::ofstream events_;
  CommandQueue queue_;
};

/// HTTP status for a domain error.
int http_status(ErrorCode code);
nlohmann::json error_body(const Error& error);
nlohmann::json audit_record_json(const audit::AuditRecord& record);

}  // namespace fcc::service
