#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rolechain/access.hpp"
#include "rolechain/audit.hpp"
#include "rolechain/constraints.hpp"
#include "rolechain/delegation.hpp"
#include "rolechain/ledger.hpp"
#include "rolechain/metrics.hpp"
#include "rolechain/policy.hpp"
#include "rolechain/tariff.hpp"

namespace rolechain {

struct EngineConfig {
  SimMs genesis_time_ms = 0;
  SimMs block_interval_ms = 500;
  std::uint32_t blocks_per_turn = 6;
  std::vector<std::string> producers{"producer1"};
  std::string issuer_account = "issuer";
  std::uint32_t confirm_depth = 1;
  std::uint64_t system_cpu_capacity_us = 1'000'000'000;
  std::uint64_t system_net_capacity_bytes = 1'000'000'000;
  std::uint64_t ram_bytes_per_token = 1024;
  ResourceTariff tariff = ResourceTariff::defaults();
};

ordered_json engine_config_to_json(const EngineConfig& cfg);
Result<EngineConfig> engine_config_from_json(const ordered_json& j);

/// How a saved chain file is brought back to life.
///  - Adopt: blocks are taken verbatim without re-hashing, so a tampered file
///    still loads and verify_chain() can report the tampering.
///  - Reproduce: every transaction is re-submitted and every block
///    re-produced; any divergence from the recorded hashes fails the load.
enum class LoadMode { Adopt, Reproduce };

struct RolePairRedundancy {
  std::string subject;
  std::string senior_role;
  std::string junior_role;
};

struct DuplicatePermissionRedundancy {
  std::string subject;
  std::string action;
  std::string target;
  std::vector<std::string> via_roles;       // sorted
  std::vector<std::string> permission_ids;  // sorted
};

struct RedundancyReport {
  std::vector<RolePairRedundancy> role_pairs;
  std::vector<DuplicatePermissionRedundancy> duplicate_permissions;

  bool empty() const { return role_pairs.empty() && duplicate_permissions.empty(); }
  ordered_json to_json() const;
};

/// Orchestrates the whole machine: the chain (ledger) serializes mutations,
/// committed transactions are dispatched against the policy, delegation, and
/// constraint stores, every effect lands in the audit journal, and the
/// complete history round-trips through a JSON-lines state file.
class Engine {
 public:
  explicit Engine(EngineConfig config, bool produce_genesis = true);

  // --- administrative console (journaled; replayed verbatim on load) ---
  Status create_account(const std::string& id, std::uint64_t stake,
                        const std::string& public_key = {});
  Status add_stake(const std::string& id, std::uint64_t tokens);
  Status delegate_bandwidth(const std::string& from, const std::string& to,
                            std::uint64_t cpu_us, std::uint64_t net_bytes,
                            std::uint64_t ram_bytes = 0);
  Status register_role(const std::string& role);
  Status add_hierarchy_edge(const std::string& senior, const std::string& junior);
  Status add_sod_rule(const std::string& rule_id, const std::string& body);
  Status add_mutual_exclusion(const std::string& role_a, const std::string& role_b);
  Status set_cardinality(std::uint32_t max_roles_per_subject);
  Status add_junior_fact(const std::string& junior, const std::string& senior);
  Status add_imply_fact(const std::string& stronger, const std::string& weaker);
  Status mark_producer_missing(const std::string& producer, bool missing);

  // --- transaction path ---
  SubmitReceipt submit(const Transaction& tx);
  SubmitReceipt submit(const std::string& sender, SimMs submitted_at_ms,
                       TxPayload payload);
  Result<std::uint64_t> produce_block(SimMs now);
  /// Produces every block due at or before `now`; returns how many.
  Result<std::uint64_t> produce_until(SimMs now);

  /// Outcome of a committed transaction, by submission sequence number.
  const Status* apply_status(std::uint64_t tx_seq) const;
  /// Decision produced by a committed access-check transaction.
  const Decision* decision_for(std::uint64_t tx_seq) const;

  // --- pure queries over committed state ---
  Decision decide(const AccessRequest& request) const;
  std::set<std::string> effective_roles(const std::string& subject, SimMs at_ms) const;
  RedundancyReport detect_redundancy() const;
  ordered_json policy_snapshot() const;

  // --- persistence ---
  Status save(const std::string& path) const;
  static Result<Engine> load(const std::string& path, LoadMode mode);
  /// Re-derives policy state purely from an exported audit stream.
  static Result<Engine> rebuild_from_audit(const EngineConfig& config,
                                           const std::vector<AuditEvent>& events);

  const EngineConfig& config() const { return config_; }
  const Ledger& ledger() const { return ledger_; }
  const PolicyStore& policy() const { return policy_; }
  const DelegationStore& delegations() const { return delegations_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const AuditLog& audit() const { return audit_; }
  const std::vector<TimelineRow>& timeline() const { return timeline_; }
  PolicyView view() const { return PolicyView(policy_, delegations_); }

 private:
  struct BatchRow {
    std::uint64_t seq = 0;
    TxKind kind = TxKind::RoleAssign;
    std::int64_t cpu_us = 0;
    std::int64_t net_bytes = 0;
    double wall_ms = 0.0;
  };

  void journal(ordered_json record) { journal_.push_back(std::move(record)); }
  void record_admin(ordered_json record);
  Status apply_admin_record(const ordered_json& record);
  void ingest_adopted_block(const Block& block);
  Status reproduce_block(const Block& recorded);
  SimMs now_ms() const;

  void on_committed_tx(const Transaction& tx, const ApplyContext& ctx);
  Status dispatch(const Transaction& tx, const ApplyContext& ctx,
                  std::optional<Decision>& decision, ordered_json& effects);
  void after_block(const Block& block);
  void sweep_expired(SimMs now_ms, std::uint64_t block_height);
  void confirm_rows(std::uint64_t produced_height);

  Status apply_role_assign(const Transaction& tx, const ApplyContext& ctx,
                           ordered_json& effects);
  Status apply_role_update(const Transaction& tx, const ApplyContext& ctx,
                           ordered_json& effects);
  Status apply_role_revoke(const Transaction& tx, const ApplyContext& ctx,
                           ordered_json& effects);
  Status apply_permission_assign(const Transaction& tx, const ApplyContext& ctx);
  Status apply_permission_update(const Transaction& tx, const ApplyContext& ctx);
  Status apply_permission_revoke(const Transaction& tx, const ApplyContext& ctx,
                                 ordered_json& effects);
  Status apply_right_transfer(const Transaction& tx, const ApplyContext& ctx,
                              ordered_json& effects);
  Status apply_remove_right_transfer(const Transaction& tx, const ApplyContext& ctx,
                                     ordered_json& effects);
  Status apply_check_access(const Transaction& tx, const ApplyContext& ctx,
                            std::optional<Decision>& decision);

  Status violation_status(const Violation& v) const;
  std::string subject_of_sender(const std::string& sender) const;
  /// Removes delegations made by `subject` of `removed_role` or any role
  /// transitively junior to it; returns the removed ids.
  std::vector<std::uint64_t> cascade_delegations(const std::string& subject,
                                                 const std::string& removed_role);
  std::optional<Violation> first_violation_now(SimMs at_ms) const;

  EngineConfig config_;
  Ledger ledger_;
  PolicyStore policy_;
  DelegationStore delegations_;
  ConstraintSet constraints_;
  AuditLog audit_;

  std::vector<ordered_json> journal_;  // admin + block records, in event order
  std::map<std::uint64_t, Status> apply_status_;
  std::map<std::uint64_t, Decision> decisions_;
  std::vector<BatchRow> batch_rows_;  // rows of the block being produced
  std::map<std::uint64_t, std::vector<TimelineRow>> unconfirmed_;  // by height
  std::vector<TimelineRow> timeline_;
};

}  // namespace rolechain
