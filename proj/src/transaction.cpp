#include "rolechain/transaction.hpp"

namespace rolechain {

const char* tx_kind_name(TxKind k) {
  switch (k) {
    case TxKind::RoleAssign: return "role_assign";
    case TxKind::RoleUpdate: return "role_update";
    case TxKind::RoleRevoke: return "role_revoke";
    case TxKind::PermissionAssign: return "permission_assign";
    case TxKind::PermissionUpdate: return "permission_update";
    case TxKind::PermissionRevoke: return "permission_revoke";
    case TxKind::RightTransfer: return "right_transfer";
    case TxKind::RemoveRightTransfer: return "remove_right_transfer";
    case TxKind::CheckAccess: return "check_access";
  }
  return "role_assign";
}

std::optional<TxKind> parse_tx_kind(std::string_view text) {
  for (std::size_t i = 0; i < kTxKindCount; ++i) {
    TxKind k = static_cast<TxKind>(i);
    if (text == tx_kind_name(k)) return k;
  }
  return std::nullopt;
}

TxKind kind_of(const TxPayload& payload) {
  return static_cast<TxKind>(payload.index());
}

bool Transaction::operator==(const Transaction& other) const {
  return kind == other.kind && sender == other.sender &&
         submitted_at_ms == other.submitted_at_ms && signature == other.signature &&
         canonical_payload_bytes(kind, payload) ==
             canonical_payload_bytes(other.kind, other.payload);
}

namespace {

void encode_condition(CanonicalWriter& w, const ContextCondition& c) {
  w.str(c.attribute);
  w.u8(static_cast<std::uint8_t>(c.comparator));
  w.u64(c.expected.size());
  for (const auto& v : c.expected) w.str(value_to_string(v));
}

void encode_permission(CanonicalWriter& w, const Permission& p) {
  w.str(p.identifier);
  w.u8(static_cast<std::uint8_t>(p.mode));
  w.str(p.role);
  w.str(p.action);
  w.str(p.target);
  w.u64(p.constraints.size());
  for (const auto& c : p.constraints) encode_condition(w, c);
  w.opt_str(p.exception);
}

void encode_context(CanonicalWriter& w, const RequestContext& ctx) {
  w.u64(ctx.attributes.size());
  for (const auto& [k, v] : ctx.attributes) {
    w.str(k);
    w.str(value_to_string(v));
  }
  w.u64(ctx.active_flags.size());
  for (const auto& f : ctx.active_flags) w.str(f);
}

struct PayloadEncoder {
  CanonicalWriter& w;

  void operator()(const RoleAssignPayload& p) {
    w.str(p.subject_id);
    w.str(p.role_name);
  }
  void operator()(const RoleUpdatePayload& p) {
    w.str(p.subject_id);
    w.str(p.new_role);
    w.opt_str(p.old_role);
  }
  void operator()(const RoleRevokePayload& p) {
    w.str(p.subject_id);
    w.str(p.role_name);
    w.u8(static_cast<std::uint8_t>(p.strength));
  }
  void operator()(const PermissionAssignPayload& p) { encode_permission(w, p.permission); }
  void operator()(const PermissionUpdatePayload& p) { encode_permission(w, p.replacement); }
  void operator()(const PermissionRevokePayload& p) { w.str(p.role_name); }
  void operator()(const RightTransferPayload& p) {
    w.str(p.delegator);
    w.str(p.delegate);
    w.str(p.role);
    w.opt_u64(p.expiry_ms);
    w.opt_u64(p.start_ms);
    w.u8(static_cast<std::uint8_t>(p.mode));
    w.u8(p.multi_step_delegatable ? 1 : 0);
    w.u32(p.levels_of_delegation);
  }
  void operator()(const RemoveRightTransferPayload& p) { w.u64(p.delegation_id); }
  void operator()(const CheckAccessPayload& p) {
    w.str(p.subject_id);
    w.str(p.operation);
    w.str(p.object);
    encode_context(w, p.context);
    w.opt_u64(p.at_ms);
  }
};

}  // namespace

std::vector<std::uint8_t> canonical_payload_bytes(TxKind kind,
                                                  const TxPayload& payload) {
  CanonicalWriter w;
  w.u8(static_cast<std::uint8_t>(kind));
  std::visit(PayloadEncoder{w}, payload);
  return w.bytes();
}

std::string compute_signature(const std::string& sender, TxKind kind,
                              const TxPayload& payload) {
  CanonicalWriter w;
  w.str(sender);
  w.raw(canonical_payload_bytes(kind, payload));
  return to_hex(w.digest());
}

bool signature_valid(const Transaction& tx) {
  return tx.signature == compute_signature(tx.sender, tx.kind, tx.payload);
}

Transaction make_transaction(const std::string& sender, SimMs submitted_at_ms,
                             TxPayload payload) {
  Transaction tx;
  tx.kind = kind_of(payload);
  tx.sender = sender;
  tx.submitted_at_ms = submitted_at_ms;
  tx.payload = std::move(payload);
  tx.signature = compute_signature(tx.sender, tx.kind, tx.payload);
  return tx;
}

namespace {

ordered_json opt_ms_json(const std::optional<SimMs>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<SimMs> opt_ms_from(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<SimMs>();
}

}  // namespace

ordered_json payload_to_json(TxKind kind, const TxPayload& payload) {
  ordered_json j;
  switch (kind) {
    case TxKind::RoleAssign: {
      const auto& p = std::get<RoleAssignPayload>(payload);
      j["subject_id"] = p.subject_id;
      j["role_name"] = p.role_name;
      break;
    }
    case TxKind::RoleUpdate: {
      const auto& p = std::get<RoleUpdatePayload>(payload);
      j["subject_id"] = p.subject_id;
      j["new_role"] = p.new_role;
      j["old_role"] = p.old_role ? ordered_json(*p.old_role) : ordered_json(nullptr);
      break;
    }
    case TxKind::RoleRevoke: {
      const auto& p = std::get<RoleRevokePayload>(payload);
      j["subject_id"] = p.subject_id;
      j["role_name"] = p.role_name;
      j["strength"] = p.strength == RevokeStrength::Strong ? "strong" : "weak";
      break;
    }
    case TxKind::PermissionAssign:
      j["permission"] =
          permission_to_json(std::get<PermissionAssignPayload>(payload).permission);
      break;
    case TxKind::PermissionUpdate:
      j["replacement"] =
          permission_to_json(std::get<PermissionUpdatePayload>(payload).replacement);
      break;
    case TxKind::PermissionRevoke:
      j["role_name"] = std::get<PermissionRevokePayload>(payload).role_name;
      break;
    case TxKind::RightTransfer: {
      const auto& p = std::get<RightTransferPayload>(payload);
      j["delegator"] = p.delegator;
      j["delegate"] = p.delegate;
      j["role"] = p.role;
      j["expiry_ms"] = opt_ms_json(p.expiry_ms);
      j["start_ms"] = opt_ms_json(p.start_ms);
      j["mode"] = delegation_mode_name(p.mode);
      j["multi_step_delegatable"] = p.multi_step_delegatable;
      j["levels_of_delegation"] = p.levels_of_delegation;
      break;
    }
    case TxKind::RemoveRightTransfer:
      j["delegation_id"] = std::get<RemoveRightTransferPayload>(payload).delegation_id;
      break;
    case TxKind::CheckAccess: {
      const auto& p = std::get<CheckAccessPayload>(payload);
      j["subject_id"] = p.subject_id;
      j["operation"] = p.operation;
      j["object"] = p.object;
      j["context"] = request_context_to_json(p.context);
      j["at_ms"] = opt_ms_json(p.at_ms);
      break;
    }
  }
  return j;
}

Result<TxPayload> payload_from_json(TxKind kind, const ordered_json& j) {
  using R = Result<TxPayload>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "payload must be an object");
  auto need = [&](std::initializer_list<const char*> keys) -> std::optional<Status> {
    for (const char* k : keys)
      if (!j.contains(k))
        return Status::fail(Errc::ParseError, std::string("payload missing field ") + k);
    return std::nullopt;
  };
  switch (kind) {
    case TxKind::RoleAssign: {
      if (auto e = need({"subject_id", "role_name"})) return R::fail(*e);
      RoleAssignPayload p;
      p.subject_id = j["subject_id"].get<std::string>();
      p.role_name = j["role_name"].get<std::string>();
      return R::success(TxPayload{std::move(p)});
    }
    case TxKind::RoleUpdate: {
      if (auto e = need({"subject_id", "new_role"})) return R::fail(*e);
      RoleUpdatePayload p;
      p.subject_id = j["subject_id"].get<std::string>();
      p.new_role = j["new_role"].get<std::string>();
      if (j.contains("old_role") && !j["old_role"].is_null())
        p.old_role = j["old_role"].get<std::string>();
      return R::success(TxPayload{std::move(p)});
    }
    case TxKind::RoleRevoke: {
      if (auto e = need({"subject_id", "role_name"})) return R::fail(*e);
      RoleRevokePayload p;
      p.subject_id = j["subject_id"].get<std::string>();
      p.role_name = j["role_name"].get<std::string>();
      if (j.contains("strength")) {
        std::string s = j["strength"].get<std::string>();
        if (s == "strong")
          p.strength = RevokeStrength::Strong;
        else if (s == "weak")
          p.strength = RevokeStrength::Weak;
        else
          return R::fail(Errc::ParseError, "strength must be weak or strong");
      }
      return R::success(TxPayload{std::move(p)});
    }
    case TxKind::PermissionAssign: {
      if (auto e = need({"permission"})) return R::fail(*e);
      auto perm = permission_from_json(j["permission"]);
      if (!perm.ok()) return R::fail(perm.status);
      return R::success(TxPayload{PermissionAssignPayload{std::move(*perm.value)}});
    }
    case TxKind::PermissionUpdate: {
      if (auto e = need({"replacement"})) return R::fail(*e);
      auto perm = permission_from_json(j["replacement"]);
      if (!perm.ok()) return R::fail(perm.status);
      return R::success(TxPayload{PermissionUpdatePayload{std::move(*perm.value)}});
    }
    case TxKind::PermissionRevoke: {
      if (auto e = need({"role_name"})) return R::fail(*e);
      return R::success(
          TxPayload{PermissionRevokePayload{j["role_name"].get<std::string>()}});
    }
    case TxKind::RightTransfer: {
      if (auto e = need({"delegator", "delegate", "role"})) return R::fail(*e);
      RightTransferPayload p;
      p.delegator = j["delegator"].get<std::string>();
      p.delegate = j["delegate"].get<std::string>();
      p.role = j["role"].get<std::string>();
      p.expiry_ms = opt_ms_from(j, "expiry_ms");
      p.start_ms = opt_ms_from(j, "start_ms");
      if (j.contains("mode")) {
        auto m = parse_delegation_mode(j["mode"].get<std::string>());
        if (!m) return R::fail(Errc::ParseError, "bad delegation mode");
        p.mode = *m;
      }
      if (j.contains("multi_step_delegatable"))
        p.multi_step_delegatable = j["multi_step_delegatable"].get<bool>();
      if (j.contains("levels_of_delegation"))
        p.levels_of_delegation = j["levels_of_delegation"].get<std::uint32_t>();
      return R::success(TxPayload{std::move(p)});
    }
    case TxKind::RemoveRightTransfer: {
      if (auto e = need({"delegation_id"})) return R::fail(*e);
      return R::success(TxPayload{
          RemoveRightTransferPayload{j["delegation_id"].get<std::uint64_t>()}});
    }
    case TxKind::CheckAccess: {
      if (auto e = need({"subject_id", "operation", "object"})) return R::fail(*e);
      CheckAccessPayload p;
      p.subject_id = j["subject_id"].get<std::string>();
      p.operation = j["operation"].get<std::string>();
      p.object = j["object"].get<std::string>();
      if (j.contains("context")) {
        auto ctx = request_context_from_json(j["context"]);
        if (!ctx.ok()) return R::fail(ctx.status);
        p.context = std::move(*ctx.value);
      }
      p.at_ms = opt_ms_from(j, "at_ms");
      return R::success(TxPayload{std::move(p)});
    }
  }
  return R::fail(Errc::ParseError, "unknown transaction kind");
}

ordered_json transaction_to_json(const Transaction& tx) {
  ordered_json j;
  j["kind"] = tx_kind_name(tx.kind);
  j["sender"] = tx.sender;
  j["submitted_at_ms"] = tx.submitted_at_ms;
  j["payload"] = payload_to_json(tx.kind, tx.payload);
  j["signature"] = tx.signature;
  return j;
}

Result<Transaction> transaction_from_json(const ordered_json& j) {
  using R = Result<Transaction>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "transaction must be an object");
  for (const char* key : {"kind", "sender", "submitted_at_ms", "payload", "signature"})
    if (!j.contains(key))
      return R::fail(Errc::ParseError, std::string("transaction missing field ") + key);
  auto kind = parse_tx_kind(j["kind"].get<std::string>());
  if (!kind) return R::fail(Errc::ParseError, "unknown transaction kind");
  auto payload = payload_from_json(*kind, j["payload"]);
  if (!payload.ok()) return R::fail(payload.status);
  Transaction tx;
  tx.kind = *kind;
  tx.sender = j["sender"].get<std::string>();
  tx.submitted_at_ms = j["submitted_at_ms"].get<SimMs>();
  tx.payload = std::move(*payload.value);
  tx.signature = j["signature"].get<std::string>();
  return R::success(std::move(tx));
}

}  // namespace rolechain
