#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "fcc/orchestrate/engine.hpp"
#include "fcc/service/cost_model.hpp"

namespace fcc::service {

/// Environment variable naming the configuration file.
inline constexpr const char* kConfigEnv = "FCC_CONFIG";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "fcc-data";
  std::filesystem::path sanctions_list;     // empty: no list
  std::filesystem::path jurisdiction_list;  // empty: no list
  std::filesystem::path wallet_registry;    // empty: no onboarding registry
  bool dev_mode = false;
  orchestrate::EngineConfig engine;
  CostModelParams cost_defaults;

  /// Relative paths resolve against `base_dir`; list files are loaded.
  /// Throws Error(InvalidConfig) naming the offending key.
  static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ServiceConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// `flag` if given, else $FCC_CONFIG, else nothing.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& flag);
/// Defaults when no path resolves.
ServiceConfig load_config(const std::optional<std::string>& flag);

}  // namespace fcc::service
