#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/context.hpp"
#include "rolechain/delegation.hpp"
#include "rolechain/digest.hpp"
#include "rolechain/policy.hpp"

namespace rolechain {

enum class TxKind : std::uint8_t {
  RoleAssign = 0,
  RoleUpdate,
  RoleRevoke,
  PermissionAssign,
  PermissionUpdate,
  PermissionRevoke,
  RightTransfer,
  RemoveRightTransfer,
  CheckAccess,
};
inline constexpr std::size_t kTxKindCount = 9;

const char* tx_kind_name(TxKind k);  // snake_case names used by every format
std::optional<TxKind> parse_tx_kind(std::string_view text);

enum class RevokeStrength : std::uint8_t { Weak, Strong };

struct RoleAssignPayload {
  std::string subject_id;
  std::string role_name;
};

struct RoleUpdatePayload {
  std::string subject_id;
  std::string new_role;
  /// Which assignment to replace; required when the subject holds several.
  std::optional<std::string> old_role;
};

struct RoleRevokePayload {
  std::string subject_id;
  std::string role_name;
  RevokeStrength strength = RevokeStrength::Weak;
};

struct PermissionAssignPayload {
  Permission permission;
};

struct PermissionUpdatePayload {
  /// Full replacement row; the identifier names the row being updated and
  /// every other field is swapped in atomically.
  Permission replacement;
};

struct PermissionRevokePayload {
  std::string role_name;  // removes every permission row of this role
};

struct RightTransferPayload {
  std::string delegator;
  std::string delegate;
  std::string role;
  std::optional<SimMs> expiry_ms;
  std::optional<SimMs> start_ms;
  DelegationMode mode = DelegationMode::Grant;
  bool multi_step_delegatable = false;
  std::uint32_t levels_of_delegation = 1;
};

struct RemoveRightTransferPayload {
  std::uint64_t delegation_id = 0;
};

struct CheckAccessPayload {
  std::string subject_id;
  std::string operation;
  std::string object;
  RequestContext context;
  /// Evaluation time for delegation liveness; defaults to the timestamp of
  /// the block the request lands in.
  std::optional<SimMs> at_ms;
};

using TxPayload =
    std::variant<RoleAssignPayload, RoleUpdatePayload, RoleRevokePayload,
                 PermissionAssignPayload, PermissionUpdatePayload,
                 PermissionRevokePayload, RightTransferPayload,
                 RemoveRightTransferPayload, CheckAccessPayload>;

/// Variant index == TxKind value; `kind_of` keeps them honest.
TxKind kind_of(const TxPayload& payload);

struct Transaction {
  TxKind kind = TxKind::RoleAssign;
  std::string sender;  // account id
  SimMs submitted_at_ms = 0;
  TxPayload payload;
  std::string signature;  // hex token binding sender to payload

  bool operator==(const Transaction& other) const;
};

/// Canonical length-prefixed payload bytes (kind tag included).
std::vector<std::uint8_t> canonical_payload_bytes(TxKind kind, const TxPayload& payload);

/// Simulated signing: the token is a digest over sender id + canonical payload.
std::string compute_signature(const std::string& sender, TxKind kind,
                              const TxPayload& payload);
bool signature_valid(const Transaction& tx);

Transaction make_transaction(const std::string& sender, SimMs submitted_at_ms,
                             TxPayload payload);

ordered_json transaction_to_json(const Transaction& tx);
Result<Transaction> transaction_from_json(const ordered_json& j);

ordered_json payload_to_json(TxKind kind, const TxPayload& payload);
Result<TxPayload> payload_from_json(TxKind kind, const ordered_json& j);

}  // namespace rolechain
