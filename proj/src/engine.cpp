#include "rolechain/engine.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <utility>

namespace rolechain {

ordered_json engine_config_to_json(const EngineConfig& cfg) {
  ordered_json j;
  j["genesis_time_ms"] = cfg.genesis_time_ms;
  j["block_interval_ms"] = cfg.block_interval_ms;
  j["blocks_per_turn"] = cfg.blocks_per_turn;
  j["producers"] = cfg.producers;
  j["issuer_account"] = cfg.issuer_account;
  j["confirm_depth"] = cfg.confirm_depth;
  j["system_cpu_capacity_us"] = cfg.system_cpu_capacity_us;
  j["system_net_capacity_bytes"] = cfg.system_net_capacity_bytes;
  j["ram_bytes_per_token"] = cfg.ram_bytes_per_token;
  ordered_json tariff;
  for (std::size_t k = 0; k < kTxKindCount; ++k) {
    ordered_json cost;
    cost["cpu_us"] = cfg.tariff.by_kind[k].cpu_us;
    cost["net_bytes"] = cfg.tariff.by_kind[k].net_bytes;
    tariff[tx_kind_name(static_cast<TxKind>(k))] = std::move(cost);
  }
  tariff["ram_bytes_per_permission_row"] = cfg.tariff.ram_bytes_per_permission_row;
  j["tariff"] = std::move(tariff);
  return j;
}

Result<EngineConfig> engine_config_from_json(const ordered_json& j) {
  using R = Result<EngineConfig>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "config must be an object");
  for (const char* key :
       {"genesis_time_ms", "block_interval_ms", "blocks_per_turn", "producers",
        "issuer_account", "confirm_depth", "system_cpu_capacity_us",
        "system_net_capacity_bytes", "ram_bytes_per_token", "tariff"})
    if (!j.contains(key))
      return R::fail(Errc::ParseError, std::string("config missing field ") + key);
  EngineConfig cfg;
  cfg.genesis_time_ms = j["genesis_time_ms"].get<SimMs>();
  cfg.block_interval_ms = j["block_interval_ms"].get<SimMs>();
  cfg.blocks_per_turn = j["blocks_per_turn"].get<std::uint32_t>();
  cfg.producers = j["producers"].get<std::vector<std::string>>();
  cfg.issuer_account = j["issuer_account"].get<std::string>();
  cfg.confirm_depth = j["confirm_depth"].get<std::uint32_t>();
  cfg.system_cpu_capacity_us = j["system_cpu_capacity_us"].get<std::uint64_t>();
  cfg.system_net_capacity_bytes = j["system_net_capacity_bytes"].get<std::uint64_t>();
  cfg.ram_bytes_per_token = j["ram_bytes_per_token"].get<std::uint64_t>();
  if (cfg.producers.empty())
    return R::fail(Errc::ParseError, "config needs at least one producer");
  if (cfg.block_interval_ms == 0 || cfg.blocks_per_turn == 0)
    return R::fail(Errc::ParseError, "block cadence fields must be positive");
  if (cfg.confirm_depth == 0)
    return R::fail(Errc::ParseError, "confirm_depth must be positive");
  const ordered_json& t = j["tariff"];
  for (std::size_t k = 0; k < kTxKindCount; ++k) {
    const char* name = tx_kind_name(static_cast<TxKind>(k));
    if (!t.contains(name))
      return R::fail(Errc::ParseError, std::string("tariff missing kind ") + name);
    cfg.tariff.by_kind[k].cpu_us = t[name]["cpu_us"].get<std::uint64_t>();
    cfg.tariff.by_kind[k].net_bytes = t[name]["net_bytes"].get<std::uint64_t>();
  }
  if (!t.contains("ram_bytes_per_permission_row"))
    return R::fail(Errc::ParseError, "tariff missing ram_bytes_per_permission_row");
  cfg.tariff.ram_bytes_per_permission_row =
      t["ram_bytes_per_permission_row"].get<std::uint64_t>();
  return R::success(std::move(cfg));
}

ordered_json RedundancyReport::to_json() const {
  ordered_json j;
  ordered_json pairs = ordered_json::array();
  for (const RolePairRedundancy& p : role_pairs) {
    ordered_json e;
    e["subject"] = p.subject;
    e["senior_role"] = p.senior_role;
    e["junior_role"] = p.junior_role;
    pairs.push_back(std::move(e));
  }
  j["role_pairs"] = std::move(pairs);
  ordered_json dups = ordered_json::array();
  for (const DuplicatePermissionRedundancy& d : duplicate_permissions) {
    ordered_json e;
    e["subject"] = d.subject;
    e["action"] = d.action;
    e["target"] = d.target;
    e["via_roles"] = d.via_roles;
    e["permission_ids"] = d.permission_ids;
    dups.push_back(std::move(e));
  }
  j["duplicate_permissions"] = std::move(dups);
  return j;
}

Engine::Engine(EngineConfig config, bool produce_genesis)
    : config_(std::move(config)),
      ledger_(config_.genesis_time_ms,
              ProducerSchedule{config_.producers, config_.blocks_per_turn,
                               config_.block_interval_ms},
              config_.tariff,
              AccountLedger(config_.system_cpu_capacity_us,
                            config_.system_net_capacity_bytes,
                            config_.ram_bytes_per_token),
              produce_genesis) {
  if (produce_genesis) {
    ordered_json rec;
    rec["record"] = "block";
    rec["block"] = block_to_json(ledger_.blocks().front());
    journal_.push_back(std::move(rec));
  }
}

SimMs Engine::now_ms() const {
  return ledger_.blocks().empty() ? config_.genesis_time_ms
                                  : ledger_.tip().timestamp_ms;
}

void Engine::record_admin(ordered_json record) {
  AuditEvent e;
  e.block_height = ledger_.blocks().empty() ? 0 : ledger_.height();
  e.tx_index = -1;
  e.at_ms = now_ms();
  e.event_kind = "admin";
  e.payload = record;
  audit_.append(std::move(e));
  journal(std::move(record));
}

// --- administrative console ----------------------------------------------

Status Engine::create_account(const std::string& id, std::uint64_t stake,
                              const std::string& public_key) {
  const std::string pk = public_key.empty() ? id : public_key;
  Status st = ledger_.accounts().create(id, pk, stake);
  if (!st.ok()) return st;
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "create_account";
  r["id"] = id;
  r["public_key"] = pk;
  r["stake"] = stake;
  record_admin(std::move(r));
  return st;
}

Status Engine::add_stake(const std::string& id, std::uint64_t tokens) {
  Status st = ledger_.accounts().add_stake(id, tokens);
  if (!st.ok()) return st;
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "add_stake";
  r["id"] = id;
  r["tokens"] = tokens;
  record_admin(std::move(r));
  return st;
}

Status Engine::delegate_bandwidth(const std::string& from, const std::string& to,
                                  std::uint64_t cpu_us, std::uint64_t net_bytes,
                                  std::uint64_t ram_bytes) {
  Status st = ledger_.accounts().delegate_bandwidth(from, to, cpu_us, net_bytes,
                                                    ram_bytes);
  if (!st.ok()) return st;
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "delegate_bandwidth";
  r["from"] = from;
  r["to"] = to;
  r["cpu_us"] = cpu_us;
  r["net_bytes"] = net_bytes;
  r["ram_bytes"] = ram_bytes;
  record_admin(std::move(r));
  return st;
}

Status Engine::register_role(const std::string& role) {
  if (policy_.role_exists(role))
    return Status::fail(Errc::DuplicateIdentifier, "role exists: " + role);
  policy_.register_role(role);
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "register_role";
  r["role"] = role;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::add_hierarchy_edge(const std::string& senior,
                                  const std::string& junior) {
  if (!policy_.role_exists(senior))
    return Status::fail(Errc::UnknownRole, senior);
  if (!policy_.role_exists(junior))
    return Status::fail(Errc::UnknownRole, junior);
  Status st = policy_.hierarchy().add_edge(senior, junior);
  if (!st.ok()) return st;
  // the edge grows every senior holder's reach, so the rule set gets a say
  if (auto v = first_violation_now(now_ms())) {
    policy_.hierarchy().remove_edge(senior, junior);
    return violation_status(*v);
  }
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "add_hierarchy_edge";
  r["senior"] = senior;
  r["junior"] = junior;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::add_sod_rule(const std::string& rule_id, const std::string& body) {
  auto parsed = ConstraintSet::parse_rule(rule_id, body);
  if (!parsed.ok()) return parsed.status;
  auto hits = constraints_.satisfied_bindings(view(), *parsed.value, now_ms(),
                                              nullptr, nullptr, true);
  if (!hits.empty()) return violation_status(hits.front());
  Status st = constraints_.add_rule(std::move(*parsed.value));
  if (!st.ok()) return st;
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "add_sod_rule";
  r["rule_id"] = rule_id;
  r["body"] = body;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::add_mutual_exclusion(const std::string& role_a,
                                    const std::string& role_b) {
  if (role_a == role_b)
    return Status::fail(Errc::DegenerateRule, "self-pair bans the role outright");
  if (!policy_.role_exists(role_a)) return Status::fail(Errc::UnknownRole, role_a);
  if (!policy_.role_exists(role_b)) return Status::fail(Errc::UnknownRole, role_b);
  SodRule compiled = ConstraintSet::compile_mutual_exclusion(role_a, role_b);
  auto hits = constraints_.satisfied_bindings(view(), compiled, now_ms(), nullptr,
                                              nullptr, true);
  if (!hits.empty()) return violation_status(hits.front());
  Status st = constraints_.add_mutual_exclusion(role_a, role_b, policy_);
  if (!st.ok()) return st;
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "add_mutual_exclusion";
  r["role_a"] = role_a;
  r["role_b"] = role_b;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::set_cardinality(std::uint32_t max_roles_per_subject) {
  if (max_roles_per_subject == 0)
    return Status::fail(Errc::UsageError, "cardinality bound must be positive");
  for (const auto& [subject, roles] : policy_.assignments())
    if (roles.size() > max_roles_per_subject)
      return Status::fail(Errc::CardinalityExceeded,
                          subject + " already holds " +
                              std::to_string(roles.size()) + " roles");
  constraints_.set_cardinality(max_roles_per_subject);
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "set_cardinality";
  r["max_roles_per_subject"] = max_roles_per_subject;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::add_junior_fact(const std::string& junior, const std::string& senior) {
  if (constraints_.junior_facts().count({junior, senior}))
    return Status::success();  // idempotent
  constraints_.add_junior_fact(junior, senior);
  if (auto v = first_violation_now(now_ms())) {
    constraints_.remove_junior_fact(junior, senior);
    return violation_status(*v);
  }
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "add_junior_fact";
  r["junior"] = junior;
  r["senior"] = senior;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::add_imply_fact(const std::string& stronger, const std::string& weaker) {
  if (constraints_.imply_facts().count({stronger, weaker}))
    return Status::success();  // idempotent
  constraints_.add_imply_fact(stronger, weaker);
  if (auto v = first_violation_now(now_ms())) {
    constraints_.remove_imply_fact(stronger, weaker);
    return violation_status(*v);
  }
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "add_imply_fact";
  r["stronger"] = stronger;
  r["weaker"] = weaker;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::mark_producer_missing(const std::string& producer, bool missing) {
  if (std::find(config_.producers.begin(), config_.producers.end(), producer) ==
      config_.producers.end())
    return Status::fail(Errc::UnknownAccount, "producer not in schedule: " + producer);
  ledger_.mark_producer_missing(producer, missing);
  ordered_json r;
  r["record"] = "admin";
  r["op"] = "mark_producer_missing";
  r["producer"] = producer;
  r["missing"] = missing;
  record_admin(std::move(r));
  return Status::success();
}

Status Engine::apply_admin_record(const ordered_json& r) {
  const std::string op = r.value("op", "");
  if (op == "create_account")
    return create_account(r.at("id").get<std::string>(),
                          r.at("stake").get<std::uint64_t>(),
                          r.at("public_key").get<std::string>());
  if (op == "add_stake")
    return add_stake(r.at("id").get<std::string>(),
                     r.at("tokens").get<std::uint64_t>());
  if (op == "delegate_bandwidth")
    return delegate_bandwidth(r.at("from").get<std::string>(),
                              r.at("to").get<std::string>(),
                              r.at("cpu_us").get<std::uint64_t>(),
                              r.at("net_bytes").get<std::uint64_t>(),
                              r.at("ram_bytes").get<std::uint64_t>());
  if (op == "register_role") return register_role(r.at("role").get<std::string>());
  if (op == "add_hierarchy_edge")
    return add_hierarchy_edge(r.at("senior").get<std::string>(),
                              r.at("junior").get<std::string>());
  if (op == "add_sod_rule")
    return add_sod_rule(r.at("rule_id").get<std::string>(),
                        r.at("body").get<std::string>());
  if (op == "add_mutual_exclusion")
    return add_mutual_exclusion(r.at("role_a").get<std::string>(),
                                r.at("role_b").get<std::string>());
  if (op == "set_cardinality")
    return set_cardinality(r.at("max_roles_per_subject").get<std::uint32_t>());
  if (op == "add_junior_fact")
    return add_junior_fact(r.at("junior").get<std::string>(),
                           r.at("senior").get<std::string>());
  if (op == "add_imply_fact")
    return add_imply_fact(r.at("stronger").get<std::string>(),
                          r.at("weaker").get<std::string>());
  if (op == "mark_producer_missing")
    return mark_producer_missing(r.at("producer").get<std::string>(),
                                 r.at("missing").get<bool>());
  return Status::fail(Errc::ParseError, "unknown admin op: " + op);
}

// --- transaction path ------------------------------------------------------

SubmitReceipt Engine::submit(const Transaction& tx) {
  return ledger_.submit_transaction(tx);
}

SubmitReceipt Engine::submit(const std::string& sender, SimMs submitted_at_ms,
                             TxPayload payload) {
  return submit(make_transaction(sender, submitted_at_ms, std::move(payload)));
}

Result<std::uint64_t> Engine::produce_block(SimMs now) {
  batch_rows_.clear();
  auto produced = ledger_.produce_block(
      now, [this](const Transaction& tx, const ApplyContext& ctx) {
        on_committed_tx(tx, ctx);
      });
  if (!produced.ok()) return produced;
  after_block(ledger_.blocks().back());
  return produced;
}

Result<std::uint64_t> Engine::produce_until(SimMs now) {
  using R = Result<std::uint64_t>;
  std::uint64_t produced = 0;
  while (ledger_.next_block_time_ms() <= now) {
    auto r = produce_block(now);
    if (!r.ok()) return R::fail(r.status);
    ++produced;
  }
  return R::success(produced);
}

void Engine::ingest_adopted_block(const Block& block) {
  batch_rows_.clear();
  ledger_.adopt_block(block, [this](const Transaction& tx, const ApplyContext& ctx) {
    on_committed_tx(tx, ctx);
  });
  after_block(ledger_.blocks().back());
}

Status Engine::reproduce_block(const Block& recorded) {
  if (recorded.height == 0) {
    if (ledger_.blocks().empty())
      return Status::fail(Errc::ReplayMismatch, "no genesis to compare against");
    if (ledger_.blocks().front().block_hash != recorded.block_hash)
      return Status::fail(Errc::ReplayMismatch, "genesis hash differs");
    return Status::success();
  }
  const std::string at = "height " + std::to_string(recorded.height);
  for (const Transaction& tx : recorded.tx_list) {
    SubmitReceipt r = submit(tx);
    if (!r.accepted)
      return Status::fail(Errc::ReplayMismatch,
                          at + ": submit rejected: " + errc_name(r.error.code));
  }
  auto produced = produce_block(recorded.timestamp_ms);
  if (!produced.ok())
    return Status::fail(Errc::ReplayMismatch,
                        at + ": " + errc_name(produced.status.code));
  if (ledger_.tip().block_hash != recorded.block_hash)
    return Status::fail(Errc::ReplayMismatch, at + ": block hash diverged");
  return Status::success();
}

const Status* Engine::apply_status(std::uint64_t tx_seq) const {
  auto it = apply_status_.find(tx_seq);
  return it == apply_status_.end() ? nullptr : &it->second;
}

const Decision* Engine::decision_for(std::uint64_t tx_seq) const {
  auto it = decisions_.find(tx_seq);
  return it == decisions_.end() ? nullptr : &it->second;
}

void Engine::on_committed_tx(const Transaction& tx, const ApplyContext& ctx) {
  const auto wall_start = std::chrono::steady_clock::now();
  std::optional<Decision> decision;
  ordered_json effects = ordered_json::object();
  Status st = dispatch(tx, ctx, decision, effects);
  const auto wall_end = std::chrono::steady_clock::now();

  apply_status_[ctx.tx_seq] = st;

  BatchRow row;
  row.seq = ctx.tx_seq;
  row.kind = tx.kind;
  row.cpu_us = ctx.cpu_charged_us;
  row.net_bytes = ctx.net_charged_bytes;
  row.wall_ms = std::chrono::duration<double, std::milli>(wall_end - wall_start).count();
  batch_rows_.push_back(row);

  std::string subject;
  switch (kind_of(tx.payload)) {
    case TxKind::RoleAssign:
      subject = std::get<RoleAssignPayload>(tx.payload).subject_id;
      break;
    case TxKind::RoleUpdate:
      subject = std::get<RoleUpdatePayload>(tx.payload).subject_id;
      break;
    case TxKind::RoleRevoke:
      subject = std::get<RoleRevokePayload>(tx.payload).subject_id;
      break;
    case TxKind::RightTransfer:
      subject = std::get<RightTransferPayload>(tx.payload).delegate;
      break;
    case TxKind::RemoveRightTransfer:
      subject = subject_of_sender(tx.sender);
      break;
    case TxKind::CheckAccess:
      subject = std::get<CheckAccessPayload>(tx.payload).subject_id;
      break;
    default:
      break;  // permission rows concern roles, not subjects
  }

  AuditEvent e;
  e.block_height = ctx.block_height;
  e.tx_index = static_cast<std::int64_t>(ctx.tx_index);
  e.at_ms = ctx.block_time_ms;
  e.event_kind = "tx";
  e.subject = std::move(subject);
  ordered_json payload;
  payload["tx"] = transaction_to_json(tx);
  payload["status"] = errc_name(st.code);
  if (!st.detail.empty()) payload["detail"] = st.detail;
  if (!effects.empty()) payload["effects"] = std::move(effects);
  if (decision) {
    e.allowed = decision->allowed;
    payload["decision"] = decision_to_json(*decision);
  }
  e.payload = std::move(payload);
  audit_.append(std::move(e));
  if (decision) decisions_[ctx.tx_seq] = std::move(*decision);
}

Status Engine::dispatch(const Transaction& tx, const ApplyContext& ctx,
                        std::optional<Decision>& decision, ordered_json& effects) {
  switch (kind_of(tx.payload)) {
    case TxKind::RoleAssign: return apply_role_assign(tx, ctx, effects);
    case TxKind::RoleUpdate: return apply_role_update(tx, ctx, effects);
    case TxKind::RoleRevoke: return apply_role_revoke(tx, ctx, effects);
    case TxKind::PermissionAssign: return apply_permission_assign(tx, ctx);
    case TxKind::PermissionUpdate: return apply_permission_update(tx, ctx);
    case TxKind::PermissionRevoke: return apply_permission_revoke(tx, ctx, effects);
    case TxKind::RightTransfer: return apply_right_transfer(tx, ctx, effects);
    case TxKind::RemoveRightTransfer:
      return apply_remove_right_transfer(tx, ctx, effects);
    case TxKind::CheckAccess: return apply_check_access(tx, ctx, decision);
  }
  return Status::fail(Errc::ParseError, "unrecognized transaction kind");
}

void Engine::after_block(const Block& block) {
  if (!batch_rows_.empty()) {
    std::vector<TimelineRow> rows(batch_rows_.size());
    double suffix_ms = 0.0;  // total wall time of the txs after this one
    for (std::size_t i = batch_rows_.size(); i-- > 0;) {
      const BatchRow& br = batch_rows_[i];
      TimelineRow row;
      row.tx_id = br.seq;
      row.kind = br.kind;
      row.exe_done_ms = static_cast<double>(block.timestamp_ms) - suffix_ms;
      row.exe_start_ms = row.exe_done_ms - br.wall_ms;
      row.block_height = block.height;
      row.cpu_us = br.cpu_us;
      row.net_bytes = br.net_bytes;
      rows[i] = row;
      suffix_ms += br.wall_ms;
    }
    auto& pending = unconfirmed_[block.height];
    pending.insert(pending.end(), rows.begin(), rows.end());
    batch_rows_.clear();
  }
  ordered_json rec;
  rec["record"] = "block";
  rec["block"] = block_to_json(block);
  journal(std::move(rec));
  sweep_expired(block.timestamp_ms, block.height);
  confirm_rows(block.height);
}

void Engine::sweep_expired(SimMs now_ms_arg, std::uint64_t block_height) {
  std::vector<Delegation> removed = delegations_.expire_due(now_ms_arg);
  if (removed.empty()) return;
  ordered_json ids = ordered_json::array();
  for (const Delegation& d : removed) ids.push_back(d.id);
  AuditEvent e;
  e.block_height = block_height;
  e.tx_index = -1;
  e.at_ms = now_ms_arg;
  e.event_kind = "delegation_expired";
  ordered_json payload;
  payload["ids"] = std::move(ids);
  e.payload = std::move(payload);
  audit_.append(std::move(e));
}

void Engine::confirm_rows(std::uint64_t produced_height) {
  const std::uint64_t depth = config_.confirm_depth;
  for (auto it = unconfirmed_.begin(); it != unconfirmed_.end();) {
    const std::uint64_t confirming_height = it->first + depth - 1;
    if (confirming_height > produced_height) {
      ++it;
      continue;
    }
    const SimMs confirmed_at =
        config_.genesis_time_ms + confirming_height * config_.block_interval_ms;
    for (TimelineRow row : it->second) {
      row.confirmed_ms = static_cast<double>(confirmed_at);
      timeline_.push_back(row);
    }
    it = unconfirmed_.erase(it);
  }
}

// --- per-kind application --------------------------------------------------

Status Engine::violation_status(const Violation& v) const {
  return Status::fail(v.kind == ViolationKind::Cardinality
                          ? Errc::CardinalityExceeded
                          : Errc::SoDViolation,
                      v.describe());
}

std::string Engine::subject_of_sender(const std::string& sender) const {
  const Account* a = ledger_.accounts().find(sender);
  return a ? a->public_key : sender;
}

std::vector<std::uint64_t> Engine::cascade_delegations(const std::string& subject,
                                                       const std::string& removed_role) {
  const std::set<std::string> roles =
      policy_.hierarchy().junior_closure({removed_role});
  std::vector<Delegation> removed =
      delegations_.remove_by_delegator_for_roles(subject, roles);
  std::vector<std::uint64_t> ids;
  ids.reserve(removed.size());
  for (const Delegation& d : removed) ids.push_back(d.id);
  return ids;
}

std::optional<Violation> Engine::first_violation_now(SimMs at_ms) const {
  return constraints_.first_violation(view(), at_ms);
}

Status Engine::apply_role_assign(const Transaction& tx, const ApplyContext& ctx,
                                 ordered_json& effects) {
  (void)effects;
  const auto& p = std::get<RoleAssignPayload>(tx.payload);
  if (tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotIssuer, tx.sender);
  if (!policy_.role_exists(p.role_name))
    return Status::fail(Errc::UnknownRole, p.role_name);
  if (policy_.find_assignment(p.subject_id, p.role_name))
    return Status::fail(Errc::DuplicateAssignment,
                        p.subject_id + " already holds " + p.role_name);
  if (auto v = constraints_.check_assignment(view(), p.subject_id, p.role_name,
                                             ctx.block_time_ms))
    return violation_status(*v);
  policy_.note_subject(p.subject_id);
  policy_.insert_assignment({p.subject_id, p.role_name, tx.sender, ctx.block_time_ms});
  return Status::success();
}

Status Engine::apply_role_update(const Transaction& tx, const ApplyContext& ctx,
                                 ordered_json& effects) {
  const auto& p = std::get<RoleUpdatePayload>(tx.payload);
  if (tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotIssuer, tx.sender);
  if (!policy_.role_exists(p.new_role))
    return Status::fail(Errc::UnknownRole, p.new_role);
  const std::set<std::string> roles = policy_.explicit_roles(p.subject_id);
  std::string old_role;
  if (p.old_role) {
    if (!roles.count(*p.old_role))
      return Status::fail(Errc::NoExistingAssignment,
                          p.subject_id + " does not hold " + *p.old_role);
    old_role = *p.old_role;
  } else if (roles.empty()) {
    return Status::fail(Errc::NoExistingAssignment, p.subject_id);
  } else if (roles.size() > 1) {
    return Status::fail(Errc::AmbiguousAssignment,
                        p.subject_id + " holds several roles; name the one to replace");
  } else {
    old_role = *roles.begin();
  }
  if (old_role == p.new_role) return Status::success();  // replacement is a no-op
  if (roles.count(p.new_role))
    return Status::fail(Errc::DuplicateAssignment,
                        p.subject_id + " already holds " + p.new_role);
  PolicyStore tentative = policy_;
  tentative.erase_assignment(p.subject_id, old_role);
  PolicyView tentative_view(tentative, delegations_);
  if (auto v = constraints_.check_assignment(tentative_view, p.subject_id,
                                             p.new_role, ctx.block_time_ms))
    return violation_status(*v);
  policy_.erase_assignment(p.subject_id, old_role);
  policy_.insert_assignment({p.subject_id, p.new_role, tx.sender, ctx.block_time_ms});
  effects["replaced_role"] = old_role;
  std::vector<std::uint64_t> cascaded = cascade_delegations(p.subject_id, old_role);
  if (!cascaded.empty()) effects["cascade_removed_delegations"] = cascaded;
  return Status::success();
}

Status Engine::apply_role_revoke(const Transaction& tx, const ApplyContext& ctx,
                                 ordered_json& effects) {
  (void)ctx;
  const auto& p = std::get<RoleRevokePayload>(tx.payload);
  if (tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotIssuer, tx.sender);
  if (!policy_.find_assignment(p.subject_id, p.role_name))
    return Status::fail(Errc::NoExistingAssignment,
                        p.subject_id + " does not hold " + p.role_name);
  std::set<std::string> removed_roles{p.role_name};
  if (p.strength == RevokeStrength::Strong) {
    for (const std::string& held : policy_.explicit_roles(p.subject_id))
      if (held != p.role_name && policy_.hierarchy().reaches(held, p.role_name))
        removed_roles.insert(held);
  }
  std::vector<std::uint64_t> cascaded;
  for (const std::string& r : removed_roles) policy_.erase_assignment(p.subject_id, r);
  for (const std::string& r : removed_roles) {
    std::vector<std::uint64_t> ids = cascade_delegations(p.subject_id, r);
    cascaded.insert(cascaded.end(), ids.begin(), ids.end());
  }
  effects["removed_roles"] =
      std::vector<std::string>(removed_roles.begin(), removed_roles.end());
  if (!cascaded.empty()) {
    std::sort(cascaded.begin(), cascaded.end());
    effects["cascade_removed_delegations"] = cascaded;
  }
  return Status::success();
}

Status Engine::apply_permission_assign(const Transaction& tx, const ApplyContext& ctx) {
  const Permission& p = std::get<PermissionAssignPayload>(tx.payload).permission;
  if (tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotIssuer, tx.sender);
  if (!policy_.role_exists(p.role)) return Status::fail(Errc::UnknownRole, p.role);
  if (policy_.find_permission(p.identifier))
    return Status::fail(Errc::DuplicateIdentifier, p.identifier);
  const std::uint64_t ram = ledger_.tariff().ram_bytes_per_permission_row;
  Status charged = ledger_.accounts().charge_ram(tx.sender, ram);
  if (!charged.ok()) return charged;
  policy_.insert_permission(p);
  if (auto v = first_violation_now(ctx.block_time_ms)) {
    policy_.erase_permission(p.identifier);
    ledger_.accounts().refund_ram(tx.sender, ram);
    return violation_status(*v);
  }
  return Status::success();
}

Status Engine::apply_permission_update(const Transaction& tx, const ApplyContext& ctx) {
  const Permission& replacement =
      std::get<PermissionUpdatePayload>(tx.payload).replacement;
  if (tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotIssuer, tx.sender);
  const Permission* existing = policy_.find_permission(replacement.identifier);
  if (!existing)
    return Status::fail(Errc::UnknownIdentifier, replacement.identifier);
  if (!policy_.role_exists(replacement.role))
    return Status::fail(Errc::UnknownRole, replacement.role);
  const Permission previous = *existing;
  policy_.erase_permission(previous.identifier);
  policy_.insert_permission(replacement);
  if (auto v = first_violation_now(ctx.block_time_ms)) {
    policy_.erase_permission(replacement.identifier);
    policy_.insert_permission(previous);
    return violation_status(*v);
  }
  return Status::success();
}

Status Engine::apply_permission_revoke(const Transaction& tx, const ApplyContext& ctx,
                                       ordered_json& effects) {
  (void)ctx;
  const auto& p = std::get<PermissionRevokePayload>(tx.payload);
  if (tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotIssuer, tx.sender);
  if (!policy_.role_exists(p.role_name))
    return Status::fail(Errc::UnknownRole, p.role_name);
  std::vector<const Permission*> rows = policy_.permissions_for_role(p.role_name);
  if (rows.empty()) return Status::fail(Errc::NoPermissionsForRole, p.role_name);
  ordered_json removed = ordered_json::array();
  for (const Permission* row : rows) removed.push_back(row->identifier);
  const std::size_t count = policy_.erase_permissions_for_role(p.role_name);
  ledger_.accounts().refund_ram(
      tx.sender, count * ledger_.tariff().ram_bytes_per_permission_row);
  effects["removed_permissions"] = std::move(removed);
  return Status::success();
}

Status Engine::apply_right_transfer(const Transaction& tx, const ApplyContext& ctx,
                                    ordered_json& effects) {
  const auto& p = std::get<RightTransferPayload>(tx.payload);
  if (subject_of_sender(tx.sender) != p.delegator)
    return Status::fail(Errc::NotAuthorizedRevoker,
                        "sender does not act for " + p.delegator);
  if (!policy_.role_exists(p.role)) return Status::fail(Errc::UnknownRole, p.role);

  bool conveys_authorization = false;
  for (const std::string& r : policy_.hierarchy().junior_closure({p.role})) {
    for (const Permission* row : policy_.permissions_for_role(r))
      if (is_authorization(row->mode)) {
        conveys_authorization = true;
        break;
      }
    if (conveys_authorization) break;
  }
  if (!conveys_authorization)
    return Status::fail(Errc::ObligationNotDelegable, p.role);

  const SimMs at = ctx.block_time_ms;
  Delegation d;
  d.delegator = p.delegator;
  d.delegate = p.delegate;
  d.role = p.role;
  d.start_ms = p.start_ms;
  d.expiry_ms = p.expiry_ms;
  d.mode = p.mode;

  const std::set<std::string> explicit_reach =
      policy_.hierarchy().junior_closure(policy_.explicit_roles(p.delegator));
  if (explicit_reach.count(p.role)) {
    d.multi_step_delegatable = p.multi_step_delegatable;
    d.levels_of_delegation = std::max<std::uint32_t>(1, p.levels_of_delegation);
    d.remaining_levels = d.levels_of_delegation;
  } else {
    std::vector<const Delegation*> covering;
    for (const auto& [id, cand] : delegations_.all())
      if (cand.delegate == p.delegator &&
          policy_.hierarchy().junior_closure({cand.role}).count(p.role))
        covering.push_back(&cand);
    if (covering.empty())
      return Status::fail(Errc::NotRoleHolder,
                          p.delegator + " does not hold " + p.role);
    std::vector<const Delegation*> live;
    for (const Delegation* c : covering)
      if (delegations_.live(*c, at)) live.push_back(c);
    if (live.empty())
      return Status::fail(Errc::ExpiredParent,
                          "no live delegation conveys " + p.role + " to " + p.delegator);
    const Delegation* parent = nullptr;
    bool exhausted_only = true;
    for (const Delegation* c : live) {
      if (!c->multi_step_delegatable || c->remaining_levels == 0) continue;
      exhausted_only = false;
      if (!parent) {
        parent = c;
        continue;
      }
      const bool c_exact = c->role == p.role;
      const bool parent_exact = parent->role == p.role;
      if (c_exact != parent_exact) {
        if (c_exact) parent = c;
      } else if (c->remaining_levels != parent->remaining_levels) {
        if (c->remaining_levels > parent->remaining_levels) parent = c;
      } else if (c->id < parent->id) {
        parent = c;
      }
    }
    if (exhausted_only)
      return Status::fail(Errc::SingleStepExhausted,
                          "no parent delegation is re-delegable");
    d.multi_step_delegatable = parent->multi_step_delegatable;
    d.levels_of_delegation = parent->levels_of_delegation;
    d.remaining_levels = parent->remaining_levels - 1;
    d.parent_id = parent->id;
  }

  // the delegate starts playing the role, so the rule set gets a say
  const CandidateAssignment candidate{p.delegate, p.role};
  for (const SodRule& rule : constraints_.rules()) {
    std::vector<Violation> hits = constraints_.satisfied_bindings(
        view(), rule, at, &candidate, nullptr, /*first_only=*/true);
    if (!hits.empty()) return violation_status(hits.front());
  }

  const std::uint64_t id = delegations_.insert(std::move(d));
  effects["delegation_id"] = id;
  const Delegation* stored = delegations_.find(id);
  if (stored && stored->parent_id) effects["parent_id"] = *stored->parent_id;
  return Status::success();
}

Status Engine::apply_remove_right_transfer(const Transaction& tx,
                                           const ApplyContext& ctx,
                                           ordered_json& effects) {
  (void)ctx;
  const auto& p = std::get<RemoveRightTransferPayload>(tx.payload);
  const Delegation* d = delegations_.find(p.delegation_id);
  if (!d)
    return Status::fail(Errc::UnknownDelegation, std::to_string(p.delegation_id));
  const std::string requester = subject_of_sender(tx.sender);
  if (requester != d->delegator && tx.sender != config_.issuer_account)
    return Status::fail(Errc::NotAuthorizedRevoker, requester);
  std::vector<Delegation> removed = delegations_.remove_tree(p.delegation_id);
  ordered_json ids = ordered_json::array();
  for (const Delegation& r : removed) ids.push_back(r.id);
  effects["removed_delegations"] = std::move(ids);
  return Status::success();
}

Status Engine::apply_check_access(const Transaction& tx, const ApplyContext& ctx,
                                  std::optional<Decision>& decision) {
  const auto& p = std::get<CheckAccessPayload>(tx.payload);
  AccessRequest request;
  request.subject_id = p.subject_id;
  request.operation = p.operation;
  request.object = p.object;
  request.at_ms = p.at_ms.value_or(ctx.block_time_ms);
  request.context = p.context;
  Decision d = view().decide(request);
  d.audit_ref = audit_.events().size() + 1;  // the event this application appends
  decision = std::move(d);
  return Status::success();
}

// --- pure queries -----------------------------------------------------------

Decision Engine::decide(const AccessRequest& request) const {
  return view().decide(request);
}

std::set<std::string> Engine::effective_roles(const std::string& subject,
                                              SimMs at_ms) const {
  return view().effective_roles(subject, at_ms);
}

RedundancyReport Engine::detect_redundancy() const {
  RedundancyReport report;
  const RoleHierarchy& h = policy_.hierarchy();
  for (const auto& [subject, held] : policy_.assignments()) {
    std::vector<std::string> roles;
    roles.reserve(held.size());
    for (const auto& [role, a] : held) roles.push_back(role);
    for (const std::string& senior : roles)
      for (const std::string& junior : roles)
        if (senior != junior && h.reaches(senior, junior))
          report.role_pairs.push_back({subject, senior, junior});
    std::map<std::pair<std::string, std::string>,
             std::pair<std::set<std::string>, std::set<std::string>>>
        reachable;  // (action, target) -> (explicit roles, permission ids)
    for (const std::string& role : roles)
      for (const std::string& junior : h.junior_closure({role}))
        for (const Permission* row : policy_.permissions_for_role(junior)) {
          auto& slot = reachable[{row->action, row->target}];
          slot.first.insert(role);
          slot.second.insert(row->identifier);
        }
    for (const auto& [key, slot] : reachable)
      if (slot.first.size() >= 2)
        report.duplicate_permissions.push_back(
            {subject, key.first, key.second,
             std::vector<std::string>(slot.first.begin(), slot.first.end()),
             std::vector<std::string>(slot.second.begin(), slot.second.end())});
  }
  return report;
}

ordered_json Engine::policy_snapshot() const {
  ordered_json j;
  ordered_json subjects = ordered_json::array();
  for (const auto& [id, s] : policy_.subjects()) subjects.push_back(id);
  j["subjects"] = std::move(subjects);
  ordered_json roles = ordered_json::array();
  for (const std::string& r : policy_.roles()) roles.push_back(r);
  j["roles"] = std::move(roles);
  ordered_json assignments = ordered_json::array();
  for (const auto& [subject, held] : policy_.assignments())
    for (const auto& [role, a] : held) {
      ordered_json e;
      e["subject"] = a.subject_id;
      e["role"] = a.role_name;
      e["assigned_by"] = a.assigned_by;
      e["assigned_at_ms"] = a.assigned_at_ms;
      assignments.push_back(std::move(e));
    }
  j["assignments"] = std::move(assignments);
  ordered_json permissions = ordered_json::array();
  for (const auto& [id, p] : policy_.permissions())
    permissions.push_back(permission_to_json(p));
  j["permissions"] = std::move(permissions);
  ordered_json edges = ordered_json::array();
  for (const auto& [senior, junior] : policy_.hierarchy().edges()) {
    ordered_json e;
    e["senior"] = senior;
    e["junior"] = junior;
    edges.push_back(std::move(e));
  }
  j["hierarchy_edges"] = std::move(edges);
  ordered_json delegations = ordered_json::array();
  for (const auto& [id, d] : delegations_.all())
    delegations.push_back(delegation_to_json(d));
  j["delegations"] = std::move(delegations);

  ordered_json constraints;
  std::vector<const SodRule*> rules;
  for (const SodRule& r : constraints_.rules()) rules.push_back(&r);
  std::sort(rules.begin(), rules.end(),
            [](const SodRule* a, const SodRule* b) { return a->rule_id < b->rule_id; });
  ordered_json rule_arr = ordered_json::array();
  for (const SodRule* r : rules) {
    ordered_json e;
    e["rule_id"] = r->rule_id;
    e["body"] = r->to_string();
    rule_arr.push_back(std::move(e));
  }
  constraints["rules"] = std::move(rule_arr);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const MutualExclusionPair& p : constraints_.pairs())
    pairs.emplace_back(p.role_a, p.role_b);
  std::sort(pairs.begin(), pairs.end());
  ordered_json pair_arr = ordered_json::array();
  for (const auto& [a, b] : pairs) {
    ordered_json e;
    e["role_a"] = a;
    e["role_b"] = b;
    pair_arr.push_back(std::move(e));
  }
  constraints["pairs"] = std::move(pair_arr);
  if (constraints_.cardinality())
    constraints["cardinality"] = constraints_.cardinality()->max_roles_per_subject;
  else
    constraints["cardinality"] = nullptr;
  ordered_json junior_arr = ordered_json::array();
  for (const auto& [x, y] : constraints_.junior_facts())
    junior_arr.push_back(ordered_json::array({x, y}));
  constraints["junior_facts"] = std::move(junior_arr);
  ordered_json imply_arr = ordered_json::array();
  for (const auto& [pp, q] : constraints_.imply_facts())
    imply_arr.push_back(ordered_json::array({pp, q}));
  constraints["imply_facts"] = std::move(imply_arr);
  j["constraints"] = std::move(constraints);
  return j;
}

// --- persistence -------------------------------------------------------------

Status Engine::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return Status::fail(Errc::IoError, "cannot open " + path);
  ordered_json config_record;
  config_record["record"] = "config";
  config_record["config"] = engine_config_to_json(config_);
  out << config_record.dump() << '\n';
  for (const ordered_json& rec : journal_) out << rec.dump() << '\n';
  for (const PendingTx& p : ledger_.pool()) {
    ordered_json rec;
    rec["record"] = "pending";
    rec["tx"] = transaction_to_json(p.tx);
    out << rec.dump() << '\n';
  }
  out.flush();
  if (!out) return Status::fail(Errc::IoError, "write failed: " + path);
  return Status::success();
}

Result<Engine> Engine::load(const std::string& path, LoadMode mode) {
  using R = Result<Engine>;
  std::ifstream in(path);
  if (!in) return R::fail(Errc::IoError, "cannot open " + path);
  std::optional<Engine> engine;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string at = path + ":" + std::to_string(line_no);
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded()) return R::fail(Errc::ParseError, at + ": bad json");
    const std::string record = j.value("record", "");
    if (record == "config") {
      if (engine) return R::fail(Errc::ParseError, at + ": duplicate config record");
      auto cfg = engine_config_from_json(j.at("config"));
      if (!cfg.ok()) return R::fail(cfg.status);
      engine.emplace(std::move(*cfg.value),
                     /*produce_genesis=*/mode == LoadMode::Reproduce);
      continue;
    }
    if (!engine)
      return R::fail(Errc::ParseError, at + ": config record must come first");
    if (record == "admin") {
      Status st = engine->apply_admin_record(j);
      if (!st.ok()) return R::fail(st);
    } else if (record == "block") {
      auto b = block_from_json(j.at("block"));
      if (!b.ok()) return R::fail(b.status);
      if (mode == LoadMode::Adopt) {
        engine->ingest_adopted_block(*b.value);
      } else {
        Status st = engine->reproduce_block(*b.value);
        if (!st.ok()) return R::fail(st);
      }
    } else if (record == "pending") {
      auto tx = transaction_from_json(j.at("tx"));
      if (!tx.ok()) return R::fail(tx.status);
      SubmitReceipt receipt = engine->submit(*tx.value);
      if (!receipt.accepted) return R::fail(receipt.error);
    } else {
      return R::fail(Errc::ParseError, at + ": unknown record kind " + record);
    }
  }
  if (!engine) return R::fail(Errc::ParseError, path + ": no config record");
  return R::success(std::move(*engine));
}

Result<Engine> Engine::rebuild_from_audit(const EngineConfig& config,
                                          const std::vector<AuditEvent>& events) {
  using R = Result<Engine>;
  Engine engine(config);
  for (const AuditEvent& e : events) {
    if (e.event_kind == "admin") {
      Status st = engine.apply_admin_record(e.payload);
      if (!st.ok()) return R::fail(st);
    } else if (e.event_kind == "delegation_expired") {
      if (!e.payload.contains("ids"))
        return R::fail(Errc::ParseError, "expiry event without ids");
      for (const auto& id : e.payload.at("ids"))
        engine.delegations_.remove_tree(id.get<std::uint64_t>());
    } else if (e.event_kind == "tx") {
      if (!e.payload.contains("tx"))
        return R::fail(Errc::ParseError, "tx event without transaction");
      auto tx = transaction_from_json(e.payload.at("tx"));
      if (!tx.ok()) return R::fail(tx.status);
      ApplyContext ctx;
      ctx.block_height = e.block_height;
      ctx.block_time_ms = e.at_ms;
      ctx.tx_index = e.tx_index < 0 ? 0 : static_cast<std::size_t>(e.tx_index);
      std::optional<Decision> decision;
      ordered_json effects = ordered_json::object();
      (void)engine.dispatch(*tx.value, ctx, decision, effects);
    } else {
      return R::fail(Errc::ParseError, "unknown audit event kind " + e.event_kind);
    }
  }
  return R::success(std::move(engine));
}

}  // namespace rolechain
