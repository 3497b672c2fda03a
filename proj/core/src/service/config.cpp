#include "fcc/service/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>

#include "fcc/common/error.hpp"

namespace fcc::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const json& v, const fs::path& base, const char* key) {
  if (!v.is_string()) throw Error(ErrorCode::InvalidConfig, key);
  fs::path p = v.get<std::string>();
  if (p.empty()) return p;
  return p.is_absolute() ? p : base / p;
}

Decimal decimal_of(const json& v, const std::string& key) {
  std::optional<Decimal> d;
  if (v.is_string()) d = Decimal::parse(v.get<std::string>());
  else if (v.is_number_integer()) d = Decimal::from_int(v.get<std::int64_t>());
  else if (v.is_number_float()) d = Decimal::from_double(v.get<double>());
  if (!d) throw Error(ErrorCode::InvalidConfig, key);
  return *d;
}

orchestrate::TaskDescriptor routing_of(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "routing");
  orchestrate::TaskDescriptor t;
  for (const auto& [key, value] : j.items()) {
    const std::string where = "routing." + key;
    try {
      if (key == "min_explainability") t.min_explainability = value.get<int>();
      else if (key == "max_cost_usd") t.max_cost_usd = decimal_of(value, where);
      else if (key == "max_latency_ms") t.max_latency_ms = value.get<int>();
      else if (key == "jurisdiction") t.jurisdiction = value.is_null() ? std::nullopt : std::optional(value.get<std::string>());
      else throw Error(ErrorCode::InvalidConfig, where);
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidConfig, where);
    }
  }
  return t;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config");
  ServiceConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "host") c.host = value.get<std::string>();
      else if (key == "port") c.port = value.get<int>();
      else if (key == "data_dir") c.data_dir = resolve(value, base_dir, "data_dir");
      else if (key == "sanctions_list") c.sanctions_list = resolve(value, base_dir, "sanctions_list");
      else if (key == "jurisdiction_list") c.jurisdiction_list = resolve(value, base_dir, "jurisdiction_list");
      else if (key == "wallet_registry") c.wallet_registry = resolve(value, base_dir, "wallet_registry");
      else if (key == "dev_mode") c.dev_mode = value.get<bool>();
      else if (key == "ruleset") c.engine.ruleset = monitor::RulesetConfig::from_json(value);
      else if (key == "optimizer") c.engine.optimizer = investigate::OptimizerState::from_json(value);
      else if (key == "policies") c.engine.policies = orchestrate::PolicySet::from_json(value);
      else if (key == "compliance_baseline") c.engine.compliance_baseline = decimal_of(value, key);
      else if (key == "routing") c.engine.investigate_task = routing_of(value);
      else if (key == "reporting_entity") c.engine.reporting_entity = value.get<std::string>();
      else if (key == "models") {
        if (!value.is_array()) throw Error(ErrorCode::InvalidConfig, "models");
        for (const auto& m : value) c.engine.models.push_back(orchestrate::ModelProfile::from_json(m));
      } else if (key == "cost_model") {
        if (!value.is_object()) throw Error(ErrorCode::InvalidConfig, "cost_model");
        std::map<std::string, std::string> fields;
        for (const auto& [name, v] : value.items()) fields[name] = v.is_string() ? v.get<std::string>() : v.dump();
        c.cost_defaults = CostModelParams::from_strings(fields, CostModelParams{});
      } else {
        throw Error(ErrorCode::InvalidConfig, key);
      }
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidConfig, key);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidParams) throw Error(ErrorCode::InvalidConfig, "cost_model." + e.detail());
      throw;
    }
  }
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::InvalidConfig, "port");
  try {
    c.engine.lists = screening::load_lists(c.sanctions_list, c.jurisdiction_list);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, "lists: " + e.detail());
  }
  c.engine.validate();
  // Reject duplicate or malformed model profiles up front.
  orchestrate::ModelRegistry check(c.engine.models, c.engine.compliance_baseline);
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json ServiceConfig::to_json() const {
  json models = json::array();
  for (const auto& m : engine.models) models.push_back(m.to_json());
  return {
      {"host", host},
      {"port", port},
      {"data_dir", data_dir.string()},
      {"sanctions_list", sanctions_list.string()},
      {"jurisdiction_list", jurisdiction_list.string()},
      {"wallet_registry", wallet_registry.string()},
      {"dev_mode", dev_mode},
      {"ruleset", engine.ruleset.to_json()},
      {"optimizer", engine.optimizer.to_json()},
      {"policies", engine.policies.to_json()},
      {"models", models},
      {"compliance_baseline", engine.compliance_baseline.to_string()},
      {"routing", engine.investigate_task.to_json()},
      {"reporting_entity", engine.reporting_entity},
      {"cost_model", cost_defaults.to_json()},
  };
}

std::optional<fs::path> resolve_config_path(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return fs::path(*flag);
  if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') return fs::path(env);
  return std::nullopt;
}

ServiceConfig load_config(const std::optional<std::string>& flag) {
  auto path = resolve_config_path(flag);
  if (!path) return ServiceConfig{};
  return ServiceConfig::load(*path);
}

}  // namespace fcc::service
