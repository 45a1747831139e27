#include "rolechain/audit.hpp"

#include <fstream>

namespace rolechain {

ordered_json audit_event_to_json(const AuditEvent& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["block_height"] = e.block_height;
  j["tx_index"] = e.tx_index;
  j["at_ms"] = e.at_ms;
  j["event_kind"] = e.event_kind;
  j["subject"] = e.subject;
  if (e.allowed.has_value())
    j["allowed"] = *e.allowed;
  else
    j["allowed"] = nullptr;
  j["payload"] = e.payload;
  return j;
}

Result<AuditEvent> audit_event_from_json(const ordered_json& j) {
  using R = Result<AuditEvent>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "audit event must be an object");
  for (const char* key :
       {"seq", "block_height", "tx_index", "at_ms", "event_kind", "subject",
        "allowed", "payload"})
    if (!j.contains(key))
      return R::fail(Errc::ParseError, std::string("audit event missing field ") + key);
  AuditEvent e;
  e.seq = j["seq"].get<std::uint64_t>();
  e.block_height = j["block_height"].get<std::uint64_t>();
  e.tx_index = j["tx_index"].get<std::int64_t>();
  e.at_ms = j["at_ms"].get<SimMs>();
  e.event_kind = j["event_kind"].get<std::string>();
  e.subject = j["subject"].get<std::string>();
  if (!j["allowed"].is_null()) e.allowed = j["allowed"].get<bool>();
  e.payload = j["payload"];
  return R::success(std::move(e));
}

void AuditLog::append(AuditEvent e) {
  e.seq = events_.size() + 1;
  events_.push_back(std::move(e));
}

std::vector<AuditEvent> AuditLog::query(const AuditFilter& filter) const {
  std::vector<AuditEvent> out;
  for (const AuditEvent& e : events_) {
    if (!filter.include_system && !e.is_tx()) continue;
    if (filter.subject && e.subject != *filter.subject) continue;
    if (filter.from_ms && e.at_ms < *filter.from_ms) continue;
    if (filter.to_ms && e.at_ms > *filter.to_ms) continue;
    if (filter.allowed && e.allowed != filter.allowed) continue;
    out.push_back(e);
  }
  return out;
}

Status AuditLog::export_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return Status::fail(Errc::IoError, "cannot open " + path);
  for (const AuditEvent& e : events_)
    out << audit_event_to_json(e).dump() << '\n';
  out.flush();
  if (!out) return Status::fail(Errc::IoError, "write failed: " + path);
  return Status::success();
}

Result<std::vector<AuditEvent>> AuditLog::load_jsonl(const std::string& path) {
  using R = Result<std::vector<AuditEvent>>;
  std::ifstream in(path);
  if (!in) return R::fail(Errc::IoError, "cannot open " + path);
  std::vector<AuditEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      return R::fail(Errc::ParseError,
                     path + ":" + std::to_string(line_no) + ": bad json");
    auto e = audit_event_from_json(j);
    if (!e.ok()) return R::fail(e.status);
    events.push_back(std::move(*e.value));
  }
  return R::success(std::move(events));
}

}  // namespace rolechain
