#include "fcc/audit/audit_log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>
#include <sstream>

#include "fcc/audit/sha256.hpp"
#include "fcc/common/error.hpp"

namespace fcc::audit {
namespace {

using json = nlohmann::json;

// Quotes and escapes one value exactly as an object dump would.
void append_value(std::string& out, const std::string& value) {
  const bool plain = std::all_of(value.begin(), value.end(), [](char c) {
    return c >= 0x20 && c != '"' && c != '\\' && static_cast<unsigned char>(c) < 0x80;
  });
  if (plain) {
    out += '"';
    out += value;
    out += '"';
    return;
  }
  try {
    out += json(value).dump();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedValue, std::string("audit record is not valid UTF-8: ") + e.what());
  }
}

void append_member(std::string& out, std::string_view key, const std::string& value) {
  if (out.size() > 1) out += ',';
  out += '"';
  out += key;
  out += "\":";
  append_value(out, value);
}

// Members in sorted key order, which is how a json object dumps. When
// hash_member is given it receives the byte range of the hash member.
std::string render(const AuditRecord& r, bool with_hash, std::pair<std::size_t, std::size_t>* hash_member = nullptr) {
  std::string out;
  out.reserve(256 + r.rationale.size() + r.action.size());
  out += '{';
  append_member(out, "action", r.action);
  append_member(out, "agent", std::string(to_string(r.agent.id)));
  append_member(out, "agent_version", r.agent.version);
  if (r.case_id) append_member(out, "case_id", *r.case_id);
  if (with_hash) {
    const std::size_t from = out.size();
    append_member(out, "hash", r.hash);
    if (hash_member) *hash_member = {from, out.size() - from};
  }
  append_member(out, "input_digest", r.input_digest);
  append_member(out, "prev_hash", r.prev_hash);
  append_member(out, "rationale", r.rationale);
  out += ",\"seq\":";
  out += std::to_string(r.seq);
  append_member(out, "timestamp", format_rfc3339(r.timestamp));
  if (r.tx_id) append_member(out, "tx_id", *r.tx_id);
  out += '}';
  return out;
}

}  // namespace


std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Malformed: return "MALFORMED";
    case ViolationKind::NonCanonical: return "NON_CANONICAL";
    case ViolationKind::SequenceGap: return "SEQUENCE_GAP";
    case ViolationKind::HashMismatch: return "HASH_MISMATCH";
    case ViolationKind::LinkMismatch: return "LINK_MISMATCH";
  }
  return "UNKNOWN";
}

std::string canonical_body(const AuditRecord& record) { return render(record, false); }

std::string compute_hash(const AuditRecord& record) { return sha256_hex(canonical_body(record)); }

std::string serialize_record(const AuditRecord& record) { return render(record, true); }

namespace {

// Flat string/unsigned members of a single object; anything nested, any other
// value type, or a repeated key stops the parse.
class FieldCollector : public nlohmann::json_sax<json> {
 public:
  struct Field {
    std::string key;
    std::string text;
    std::uint64_t number = 0;
    bool is_number = false;
  };
  std::vector<Field> fields;

  bool null() override { return false; }
  bool boolean(bool) override { return false; }
  bool number_integer(number_integer_t) override { return false; }
  bool number_float(number_float_t, const string_t&) override { return false; }
  bool binary(binary_t&) override { return false; }
  bool start_array(std::size_t) override { return false; }
  bool end_array() override { return false; }
  bool number_unsigned(number_unsigned_t v) override {
    if (fields.empty()) return false;
    fields.back().number = v;
    fields.back().is_number = true;
    return true;
  }
  bool string(string_t& v) override {
    if (fields.empty()) return false;
    fields.back().text = std::move(v);
    return true;
  }
  bool start_object(std::size_t) override { return depth_++ == 0; }
  bool end_object() override {
    --depth_;
    return true;
  }
  bool key(string_t& k) override {
    for (const auto& f : fields) {
      if (f.key == k) return false;
    }
    fields.push_back(Field{std::move(k), {}, 0, false});
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  int depth_ = 0;
};

std::optional<AuditRecord> record_from_fields(std::vector<FieldCollector::Field>& fields);

// Accepts only the shape render() produces with unescaped ASCII strings.
// Anything else is left to the general parser.
std::optional<AuditRecord> collect_plain(std::string_view line) {
  std::vector<FieldCollector::Field> fields;
  fields.reserve(11);
  std::size_t i = 0;
  const std::size_t n = line.size();
  if (n < 2 || line[i++] != '{') return std::nullopt;
  while (true) {
    if (i >= n || line[i++] != '"') return std::nullopt;
    const std::size_t key_end = line.find('"', i);
    if (key_end == std::string_view::npos) return std::nullopt;
    FieldCollector::Field f;
    f.key = std::string(line.substr(i, key_end - i));
    i = key_end + 1;
    if (i >= n || line[i++] != ':') return std::nullopt;
    if (i < n && line[i] == '"') {
      const std::size_t start = ++i;
      while (i < n && line[i] != '"') {
        const auto c = static_cast<unsigned char>(line[i]);
        if (c < 0x20 || c >= 0x80 || c == '\\') return std::nullopt;
        ++i;
      }
      if (i >= n) return std::nullopt;
      f.text = std::string(line.substr(start, i - start));
      ++i;
    } else {
      const std::size_t start = i;
      std::uint64_t v = 0;
      while (i < n && line[i] >= '0' && line[i] <= '9') {
        if (v > (UINT64_MAX - 9) / 10) return std::nullopt;
        v = v * 10 + static_cast<std::uint64_t>(line[i] - '0');
        ++i;
      }
      if (i == start) return std::nullopt;
      f.number = v;
      f.is_number = true;
    }
    fields.push_back(std::move(f));
    if (i >= n) return std::nullopt;
    const char sep = line[i++];
    if (sep == '}') break;
    if (sep != ',') return std::nullopt;
  }
  if (i != n) return std::nullopt;
  return record_from_fields(fields);
}

std::optional<AuditRecord> collect_record(std::string_view line) {
  if (line.empty() || line.front() != '{') return std::nullopt;
  FieldCollector sax;
  sax.fields.reserve(11);
  bool ok = false;
  try {
    ok = json::sax_parse(line.begin(), line.end(), &sax);
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (!ok) return std::nullopt;
  return record_from_fields(sax.fields);
}

std::optional<AuditRecord> record_from_fields(std::vector<FieldCollector::Field>& fields) {
  AuditRecord r;
  bool have_seq = false, have_ts = false, have_agent = false;
  unsigned required = 0;
  for (auto& f : fields) {
    const std::string& k = f.key;
    if (k == "seq") {
      if (!f.is_number) return std::nullopt;
      r.seq = f.number;
      have_seq = true;
      continue;
    }
    if (f.is_number) return std::nullopt;
    if (k == "timestamp") {
      auto ts = parse_rfc3339(f.text);
      if (!ts) return std::nullopt;
      r.timestamp = *ts;
      have_ts = true;
    } else if (k == "agent") {
      auto agent = parse_agent_id(f.text);
      if (!agent) return std::nullopt;
      r.agent.id = *agent;
      have_agent = true;
    } else if (k == "agent_version") {
      r.agent.version = std::move(f.text);
      required |= 1;
    } else if (k == "action") {
      r.action = std::move(f.text);
      required |= 2;
    } else if (k == "rationale") {
      r.rationale = std::move(f.text);
      required |= 4;
    } else if (k == "input_digest") {
      r.input_digest = std::move(f.text);
      required |= 8;
    } else if (k == "prev_hash") {
      r.prev_hash = std::move(f.text);
      required |= 16;
    } else if (k == "hash") {
      r.hash = std::move(f.text);
      required |= 32;
    } else if (k == "case_id") {
      r.case_id = std::move(f.text);
    } else if (k == "tx_id") {
      r.tx_id = std::move(f.text);
    } else {
      return std::nullopt;
    }
  }
  if (!have_seq || !have_ts || !have_agent || required != 63) return std::nullopt;
  return r;
}

}  // namespace

AuditRecord parse_record(std::string_view line) {
  auto r = collect_record(line);
  if (!r) throw Error(ErrorCode::MalformedValue, "audit record line is malformed");
  return std::move(*r);
}

std::optional<ChainViolation> verify_chain(std::span<const AuditRecord> records) {
  const std::string* prev = &kGenesisHash;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AuditRecord& r = records[i];
    if (r.seq != i) return ChainViolation{i, ViolationKind::SequenceGap};
    if (r.rationale.empty()) return ChainViolation{i, ViolationKind::Malformed};
    std::string expected;
    try {
      expected = compute_hash(r);
    } catch (const Error&) {
      return ChainViolation{i, ViolationKind::Malformed};
    }
    if (expected != r.hash) return ChainViolation{i, ViolationKind::HashMismatch};
    if (r.prev_hash != *prev) return ChainViolation{i, ViolationKind::LinkMismatch};
    prev = &r.hash;
  }
  return std::nullopt;
}

std::optional<ChainViolation> verify_persisted(std::string_view content) {
  std::string prev = kGenesisHash;
  std::uint64_t index = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    // Every record line is newline-terminated.
    if (nl == std::string_view::npos) return ChainViolation{index, ViolationKind::Malformed};
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;

    // Canonical lines take the plain scanner; only a line it cannot confirm
    // goes through the general parser.
    std::optional<AuditRecord> parsed = collect_plain(line);
    if (parsed) {
      try {
        if (serialize_record(*parsed) != line) parsed.reset();
      } catch (const Error&) {
        parsed.reset();
      }
    }
    if (!parsed) parsed = collect_record(line);
    if (!parsed) return ChainViolation{index, ViolationKind::Malformed};
    AuditRecord& r = *parsed;
    // Re-rendering reproduces the line only when key order, spacing, escapes
    // and the timestamp and agent spellings are all canonical.
    std::string body;
    try {
      std::pair<std::size_t, std::size_t> hash_member;
      body = render(r, true, &hash_member);
      if (body != line) return ChainViolation{index, ViolationKind::NonCanonical};
      body.erase(hash_member.first, hash_member.second);
    } catch (const Error&) {
      return ChainViolation{index, ViolationKind::NonCanonical};
    }
    if (r.seq != index) return ChainViolation{index, ViolationKind::SequenceGap};
    if (r.rationale.empty()) return ChainViolation{index, ViolationKind::Malformed};
    if (sha256_hex(body) != r.hash) return ChainViolation{index, ViolationKind::HashMismatch};
    if (r.prev_hash != prev) return ChainViolation{index, ViolationKind::LinkMismatch};
    prev = std::move(r.hash);
    ++index;
  }
  return std::nullopt;
}

std::optional<ChainViolation> verify_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return verify_persisted(buf.str());
}

std::vector<AuditRecord> AuditLog::load(const std::filesystem::path& path) {
  std::vector<AuditRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  if (auto violation = verify_persisted(content)) {
    throw Error(ErrorCode::ChainBroken, "seq " + std::to_string(violation->seq) + " " +
                                            std::string(to_string(violation->kind)));
  }
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    out.push_back(parse_record(std::string_view(content).substr(pos, nl - pos)));
    pos = nl + 1;
  }
  return out;
}

void AuditLog::attach_file(const std::filesystem::path& path) {
  const std::vector<AuditRecord> persisted = load(path);
  const std::size_t on_disk = persisted.size();
  if (on_disk > records_.size()) {
    throw Error(ErrorCode::ChainBroken, "persisted log is longer than the in-memory log");
  }
  for (std::size_t i = 0; i < on_disk; ++i) {
    if (persisted[i] != records_[i]) {
      throw Error(ErrorCode::ChainBroken, "persisted record " + std::to_string(i) + " diverges");
    }
  }
  sink_.close();
  sink_.open(path, std::ios::binary | std::ios::app);
  if (!sink_) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  for (std::size_t i = on_disk; i < records_.size(); ++i) sink_ << serialize_record(records_[i]) << '\n';
  sink_.flush();
}

const AuditRecord& AuditLog::append(AuditEntry entry) {
  if (entry.rationale.empty()) throw Error(ErrorCode::EmptyRationale, entry.action);
  AuditRecord r;
  r.seq = records_.size();
  r.timestamp = entry.timestamp;
  r.agent = std::move(entry.agent);
  r.action = std::move(entry.action);
  r.case_id = std::move(entry.case_id);
  r.tx_id = std::move(entry.tx_id);
  r.rationale = std::move(entry.rationale);
  r.input_digest = std::move(entry.input_digest);
  r.prev_hash = head_hash();
  r.hash = compute_hash(r);
  if (sink_.is_open()) {
    sink_ << serialize_record(r) << '\n';
    sink_.flush();
    if (!sink_) throw Error(ErrorCode::IoError, "audit append failed");
  }
  records_.push_back(std::move(r));
  return records_.back();
}

std::vector<AuditRecord> AuditLog::query(const AuditFilter& filter) const {
  std::vector<AuditRecord> out;
  for (const auto& r : records_) {
    if (filter.case_id && r.case_id != filter.case_id) continue;
    if (filter.agent && r.agent.id != *filter.agent) continue;
    if (filter.action && r.action != *filter.action) continue;
    if (filter.seq_from && r.seq < *filter.seq_from) continue;
    if (filter.seq_to && r.seq > *filter.seq_to) continue;
    out.push_back(r);
  }
  return out;
}

std::string digest_of(std::string_view canonical_input) { return sha256_hex(canonical_input); }

}  // namespace fcc::audit
