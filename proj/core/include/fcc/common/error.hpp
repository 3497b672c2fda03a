#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fcc {

enum class ErrorCode {
  MissingField,
  MalformedValue,
  OutOfOrderBatch,
  InfeasibleConfig,
  InvalidConfig,
  WalletNotParty,
  OutOfRange,
  DisjointAlerts,
  UnknownCase,
  DuplicateFeedback,
  NotEscalated,
  NotRecommended,
  IllegalTransition,
  UnknownAgent,
  UnknownProfile,
  FallbackImmutable,
  EmptyRationale,
  InvalidParams,
  NotPending,
  UnknownEscalation,
  NotFound,
  ArchiveConflict,
  ChainBroken,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Domain error carried through every module. `detail` holds the offending
/// field name, index or identifier so callers can render `{code, message}`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fcc
