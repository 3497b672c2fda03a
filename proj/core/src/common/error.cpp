#include "fcc/common/error.hpp"

namespace fcc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::MalformedValue: return "MalformedValue";
    case ErrorCode::OutOfOrderBatch: return "OutOfOrderBatch";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::WalletNotParty: return "WalletNotParty";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DisjointAlerts: return "DisjointAlerts";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::DuplicateFeedback: return "DuplicateFeedback";
    case ErrorCode::NotEscalated: return "NotEscalated";
    case ErrorCode::NotRecommended: return "NotRecommended";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::UnknownProfile: return "UnknownProfile";
    case ErrorCode::FallbackImmutable: return "FallbackImmutable";
    case ErrorCode::EmptyRationale: return "EmptyRationale";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NotPending: return "NotPending";
    case ErrorCode::UnknownEscalation: return "UnknownEscalation";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ArchiveConflict: return "ArchiveConflict";
    case ErrorCode::ChainBroken: return "ChainBroken";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace fcc
