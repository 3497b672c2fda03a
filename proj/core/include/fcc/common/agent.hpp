#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace fcc {

/// Closed set of agents that may act on the system. Humans are not agents;
/// their decisions are recorded through handovers.
enum class AgentId { Ingest, Screening, Monitoring, Triage, Investigation, Reporting, Orchestrator };

inline constexpr std::array kAllAgents{AgentId::Ingest,        AgentId::Screening, AgentId::Monitoring,
                                       AgentId::Triage,        AgentId::Investigation,
                                       AgentId::Reporting,     AgentId::Orchestrator};

std::string_view to_string(AgentId id);
std::optional<AgentId> parse_agent_id(std::string_view text);

struct AgentIdentity {
  AgentId id = AgentId::Orchestrator;
  std::string version = "1.0";

  friend bool operator==(const AgentIdentity&, const AgentIdentity&) = default;
};

}  // namespace fcc
