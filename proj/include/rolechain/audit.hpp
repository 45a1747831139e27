#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/context.hpp"

namespace rolechain {

/// One immutable journal entry. Transaction applications carry the index of
/// the transaction inside its block; administrative and system entries use
/// tx_index -1 so they can be filtered out of per-transaction views.
struct AuditEvent {
  std::uint64_t seq = 0;
  std::uint64_t block_height = 0;
  std::int64_t tx_index = -1;
  SimMs at_ms = 0;
  std::string event_kind;              // "tx", "admin", "delegation_expired"
  std::string subject;                 // principal concerned, if any
  std::optional<bool> allowed;         // set for access-check outcomes
  ordered_json payload;

  bool is_tx() const { return tx_index >= 0; }
};

struct AuditFilter {
  bool include_system = false;  // admin + expiry entries too
  std::optional<std::string> subject;
  std::optional<SimMs> from_ms;  // inclusive
  std::optional<SimMs> to_ms;    // inclusive
  std::optional<bool> allowed;   // restrict to access outcomes with this result
};

ordered_json audit_event_to_json(const AuditEvent& e);
Result<AuditEvent> audit_event_from_json(const ordered_json& j);

/// Append-only event journal with sequence numbers assigned on insert.
class AuditLog {
 public:
  /// Stamps the next sequence number onto `e` and stores it.
  void append(AuditEvent e);

  const std::vector<AuditEvent>& events() const { return events_; }

  /// Events passing the filter, in insertion order. The default filter keeps
  /// exactly the transaction applications.
  std::vector<AuditEvent> query(const AuditFilter& filter = {}) const;

  Status export_jsonl(const std::string& path) const;
  static Result<std::vector<AuditEvent>> load_jsonl(const std::string& path);

 private:
  std::vector<AuditEvent> events_;
};

}  // namespace rolechain
