#include "fcc/common/agent.hpp"

namespace fcc {

std::string_view to_string(AgentId id) {
  switch (id) {
    case AgentId::Ingest: return "INGEST";
    case AgentId::Screening: return "SCREENING";
    case AgentId::Monitoring: return "MONITORING";
    case AgentId::Triage: return "TRIAGE";
    case AgentId::Investigation: return "INVESTIGATION";
    case AgentId::Reporting: return "REPORTING";
    case AgentId::Orchestrator: return "ORCHESTRATOR";
  }
  return "UNKNOWN";
}

std::optional<AgentId> parse_agent_id(std::string_view text) {
  for (AgentId id : kAllAgents) {
    if (to_string(id) == text) return id;
  }
  return std::nullopt;
}

}  // namespace fcc
