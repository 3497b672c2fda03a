#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fcc/report/str_report.hpp"

namespace fcc::report {

/// Immutable report store: `<id>.json` plus a `<id>.txt` narrative sibling.
class ReportArchive {
 public:
  explicit ReportArchive(std::filesystem::path dir);

  /// Writes both files. Rewriting identical content is a no-op; different
  /// content under an existing id throws Error(ArchiveConflict).
  void store(const StrReport& report) const;
  std::optional<StrReport> load(const std::string& report_id) const;
  bool contains(const std::string& report_id) const;
  /// Copies both files into `outbox`; the simulated FIU submission.
  std::filesystem::path submit(const std::string& report_id, const std::filesystem::path& outbox) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Serialized archival form (single line, no trailing newline).
std::string archive_text(const StrReport& report);

}  // namespace fcc::report
