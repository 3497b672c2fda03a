#include "fcc/report/archive.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "fcc/common/error.hpp"

namespace fcc::report {
namespace fs = std::filesystem;
namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_once(const fs::path& path, const std::string& content) {
  if (auto existing = read_file(path)) {
    if (*existing == content) return;
    throw Error(ErrorCode::ArchiveConflict, path.filename().string());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string archive_text(const StrReport& report) { return report.to_json().dump(); }

ReportArchive::ReportArchive(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void ReportArchive::store(const StrReport& report) const {
  write_once(dir_ / (report.report_id + ".json"), archive_text(report) + "\n");
  write_once(dir_ / (report.report_id + ".txt"), report.narrative + "\n");
}

bool ReportArchive::contains(const std::string& report_id) const {
  return fs::exists(dir_ / (report_id + ".json"));
}

std::optional<StrReport> ReportArchive::load(const std::string& report_id) const {
  auto text = read_file(dir_ / (report_id + ".json"));
  if (!text) return std::nullopt;
  try {
    return StrReport::from_json(nlohmann::json::parse(*text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedValue, report_id + ": " + e.what());
  }
}

fs::path ReportArchive::submit(const std::string& report_id, const fs::path& outbox) const {
  fs::create_directories(outbox);
  for (const char* ext : {".json", ".txt"}) {
    auto content = read_file(dir_ / (report_id + ext));
    if (!content) throw Error(ErrorCode::NotFound, report_id + ext);
    write_once(outbox / (report_id + ext), *content);
  }
  return outbox / (report_id + ".json");
}

}  // namespace fcc::report
