#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcc/common/agent.hpp"
#include "fcc/audit/sha256.hpp"
#include "fcc/common/time.hpp"

namespace fcc::audit {

/// An audit record before the log assigns `seq`, `prev_hash` and `hash`.
struct AuditEntry {
  Timestamp timestamp{};
  AgentIdentity agent;
  std::string action;
  std::optional<std::string> case_id;
  std::optional<std::string> tx_id;
  std::string rationale;
  std::string input_digest;
};

struct AuditRecord {
  std::uint64_t seq = 0;
  Timestamp timestamp{};
  AgentIdentity agent;
  std::string action;
  std::optional<std::string> case_id;
  std::optional<std::string> tx_id;
  std::string rationale;
  std::string input_digest;
  std::string prev_hash;
  std::string hash;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

/// Key-ordered, whitespace-free serialization of every field except `hash`.
/// This is the exact byte string the record hash is computed over.
std::string canonical_body(const AuditRecord& record);
std::string compute_hash(const AuditRecord& record);
/// Persisted line form (includes `hash`, no trailing newline).
std::string serialize_record(const AuditRecord& record);
/// Throws Error(MalformedValue) on anything that is not a complete record.
AuditRecord parse_record(std::string_view line);

enum class ViolationKind { Malformed, NonCanonical, SequenceGap, HashMismatch, LinkMismatch };
std::string_view to_string(ViolationKind kind);

struct ChainViolation {
  std::uint64_t seq = 0;
  ViolationKind kind = ViolationKind::Malformed;

  friend bool operator==(const ChainViolation&, const ChainViolation&) = default;
};

/// Recomputes every hash and link; nullopt means the chain is intact.
std::optional<ChainViolation> verify_chain(std::span<const AuditRecord> records);
/// Verifies the persisted line-delimited form byte for byte: each line must
/// parse, be in canonical form, and chain correctly. `seq` in a violation is
/// the zero-based line index.
std::optional<ChainViolation> verify_persisted(std::string_view content);
std::optional<ChainViolation> verify_file(const std::filesystem::path& path);

struct AuditFilter {
  std::optional<std::string> case_id;
  std::optional<AgentId> agent;
  std::optional<std::string> action;
  std::optional<std::uint64_t> seq_from;  // inclusive
  std::optional<std::uint64_t> seq_to;    // inclusive
};

/// Append-only hash-chained log. Records live in memory; when a file is
/// attached every append is written and flushed before it returns, so the
/// record is on disk before the caller applies the audited effect.
class AuditLog {
 public:
  AuditLog() = default;
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  /// Reads and verifies a persisted log. Throws Error(ChainBroken) with the
  /// violating line on failure.
  static std::vector<AuditRecord> load(const std::filesystem::path& path);

  /// Starts mirroring appends to `path`. Existing records are rewritten
  /// when the file is shorter than the in-memory log.
  void attach_file(const std::filesystem::path& path);

  /// Throws Error(EmptyRationale) when `entry.rationale` is empty.
  const AuditRecord& append(AuditEntry entry);

  std::span<const AuditRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const std::string& head_hash() const { return records_.empty() ? kGenesisHash : records_.back().hash; }
  std::uint64_t next_seq() const { return records_.size(); }

  std::vector<AuditRecord> query(const AuditFilter& filter) const;
  std::optional<ChainViolation> verify() const { return verify_chain(records_); }

 private:
  std::vector<AuditRecord> records_;
  std::ofstream sink_;
};

/// Digest helper for `input_digest` fields.
std::string digest_of(std::string_view canonical_input);

}  // namespace fcc::audit
