// fccctl: operator command line for the compliance pipeline.
//
// Exit codes: 0 success, 1 domain error (bad input, broken chain, ...),
// 2 usage error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fcc/audit/audit_log.hpp"
#include "fcc/ingest/generator.hpp"
#include "fcc/monitor/evaluation.hpp"
#include "fcc/orchestrate/engine.hpp"
#include "fcc/screening/screening.hpp"
#include "fcc/service/compliance_service.hpp"
#include "fcc/service/config.hpp"
#include "fcc/service/cost_model.hpp"
#include "fcc/service/http_server.hpp"

namespace {

using nlohmann::json;
using namespace fcc;

struct Globals {
  std::optional<std::string> config;
  std::string format = "text";
};

void print_text(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) print_text(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) print_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

void emit(const Globals& g, const json& j) {
  if (g.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else {
    print_text(j, "", std::cout);
  }
}

std::vector<ingest::TradeEvent> read_events(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  auto parsed = ingest::read_trade_events(in);
  if (!parsed.failures.empty()) {
    const auto& f = parsed.failures.front();
    throw Error(ErrorCode::MalformedValue, path + ":" + std::to_string(f.line_number) + ": " + f.message);
  }
  return std::move(parsed.events);
}

std::vector<ingest::GroundTruthLabel> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return ingest::read_labels(in);
}

template <typename Rows>
void write_lines(const std::string& path, const Rows& rows, std::string (*serialize)(const typename Rows::value_type&)) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& r : rows) out << serialize(r) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

service::HttpServer* g_server = nullptr;
void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fccctl - financial crime compliance pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Configuration file (default: $FCC_CONFIG)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic labelled trade stream");
  ingest::GeneratorConfig gen;
  std::string gen_out, gen_labels;
  generate->add_option("--seed", gen.seed);
  generate->add_option("--n", gen.n_transactions, "Transactions");
  generate->add_option("--wallets", gen.n_wallets);
  generate->add_option("--collections", gen.n_collections);
  generate->add_option("--suspicious", gen.target_suspicious_fraction, "Target suspicious fraction");
  generate->add_option("-o,--output", gen_out)->required();
  generate->add_option("--labels", gen_labels)->required();

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Append a trade file to the service data directory");
  std::string ingest_input, ingest_request;
  ingest_cmd->add_option("--input", ingest_input)->required();
  ingest_cmd->add_option("--request-id", ingest_request);

  // run
  auto* run = app.add_subcommand("run", "Process a trade file in memory and print the summary");
  std::string run_input, run_labels, run_alerts;
  run->add_option("--input", run_input)->required();
  run->add_option("--labels", run_labels, "Ground-truth labels for detection metrics");
  run->add_option("--alerts-out", run_alerts, "Write alerts as JSON lines");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::optional<int> serve_port;
  serve->add_option("--port", serve_port);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Re-run the threshold optimizer on recorded feedback");
  std::string calibrate_request;
  calibrate->add_option("--request-id", calibrate_request);

  // report
  auto* report = app.add_subcommand("report", "Print a drafted STR");
  std::string report_id;
  report->add_option("--id", report_id)->required();

  // audit-verify
  auto* verify = app.add_subcommand("audit-verify", "Verify the audit hash chain");
  std::string verify_file;
  verify->add_option("--file", verify_file, "Audit file (default: <data_dir>/audit.jsonl)");

  // cost-report
  auto* cost = app.add_subcommand("cost-report", "Manual-review cost model");
  std::map<std::string, std::string> cost_params;
  cost->set_help_flag("--help", "Print this help message and exit");
  const std::vector<std::pair<const char*, std::string>> cost_flags = {
      {"U", "-U,--users"},          {"R", "-R,--tx-per-user"},     {"s", "-s,--suspicion-rate"},
      {"h", "-h,--hours-per-alert"}, {"Y", "-Y,--fte-hours"},       {"k", "-k,--calls-per-alert"},
      {"p", "-p,--usd-per-call"},
  };
  for (const auto& [key, names] : cost_flags) {
    cost->add_option_function<std::string>(names, [&cost_params, key = key](const std::string& v) {
      cost_params[key] = v;
    });
  }
  cost->add_option_function<std::string>(
      "--automated-seconds", [&cost_params](const std::string& v) { cost_params["automated_seconds"] = v; });

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Service metrics from the data directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      const auto stream = ingest::generate_synthetic(gen);
      write_lines(gen_out, stream.events, &ingest::serialize_trade_event);
      write_lines(gen_labels, stream.labels, &ingest::serialize_label);
      std::size_t suspicious = 0;
      for (const auto& l : stream.labels) suspicious += l.suspicious ? 1 : 0;
      emit(g, {{"transactions", stream.events.size()},
               {"suspicious_transactions", suspicious},
               {"output", gen_out},
               {"labels", gen_labels}});
      return 0;
    }

    if (verify->parsed()) {
      std::filesystem::path path = verify_file;
      if (path.empty()) path = service::load_config(g.config).data_dir / "audit.jsonl";
      if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "no audit file at " + path.string());
      const auto violation = audit::verify_file(path);
      json body = {{"ok", !violation}, {"file", path.string()}};
      if (violation) body["violation"] = {{"seq", violation->seq}, {"kind", audit::to_string(violation->kind)}};
      emit(g, body);
      return violation ? 1 : 0;
    }

    const service::ServiceConfig config = service::load_config(g.config);

    if (cost->parsed()) {
      const auto params = service::CostModelParams::from_strings(cost_params, config.cost_defaults);
      json body = service::compute_cost_report(params).to_json();
      body["params"] = params.to_json();
      emit(g, body);
      return 0;
    }

    if (run->parsed()) {
      orchestrate::Engine engine(config.engine);
      if (!config.wallet_registry.empty()) engine.seed_wallets(screening::read_wallet_registry_file(config.wallet_registry));
      const auto events = read_events(run_input);
      json body = engine.run_pipeline(events).to_json();
      if (!run_alerts.empty()) {
        std::ofstream out(run_alerts, std::ios::binary | std::ios::trunc);
        for (const auto& a : engine.monitor().alerts()) out << monitor::to_json(a).dump() << '\n';
      }
      if (!run_labels.empty()) {
        const auto labels = read_labels(run_labels);
        body["detection"] = monitor::evaluate_detection(labels, engine.monitor().alerts()).to_json();
      }
      body["state_digest"] = engine.state_digest();
      emit(g, body);
      return 0;
    }

    service::ComplianceService svc(config);
    if (ingest_cmd->parsed()) {
      emit(g, svc.ingest(read_events(ingest_input), ingest_request));
    } else if (calibrate->parsed()) {
      emit(g, svc.calibrate(calibrate_request));
    } else if (report->parsed()) {
      if (g.format == "json") {
        emit(g, svc.report_json(report_id));
      } else {
        std::cout << svc.report_text(report_id) << '\n';
      }
    } else if (metrics->parsed()) {
      emit(g, svc.metrics());
    } else if (serve->parsed()) {
      service::HttpServer server(svc);
      const int port = server.bind(config.host, serve_port.value_or(config.port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << config.host << ":" << port << std::endl;
      server.listen();
      g_server = nullptr;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
