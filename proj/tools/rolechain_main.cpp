#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rolechain/bench.hpp"
#include "rolechain/bundle.hpp"
#include "rolechain/engine.hpp"

namespace {

using namespace rolechain;

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

void print_doc(const ordered_json& doc) { std::cout << doc.dump(2) << "\n"; }
void print_human(const std::string& line) { std::cerr << line << "\n"; }

int fail_status(const Status& st, int code = kDomainError) {
  ordered_json doc;
  ordered_json err;
  err["code"] = errc_name(st.code);
  if (!st.detail.empty()) err["detail"] = st.detail;
  doc["error"] = std::move(err);
  print_doc(doc);
  std::string line = std::string("error: ") + errc_name(st.code);
  if (!st.detail.empty()) line += ": " + st.detail;
  print_human(line);
  return code;
}

int fail_usage(const std::string& message) {
  return fail_status(Status::fail(Errc::UsageError, message), kUsageError);
}

struct Session {
  std::string chain_path;

  Result<Engine> open() const {
    using R = Result<Engine>;
    if (chain_path.empty())
      return R::fail(Errc::UsageError,
                     "no chain file: pass --chain or set ROLECHAIN_CHAIN");
    return Engine::load(chain_path, LoadMode::Adopt);
  }

  int open_or_fail(std::optional<Engine>& engine) const {
    auto loaded = open();
    if (!loaded.ok())
      return fail_status(loaded.status,
                         loaded.status.code == Errc::UsageError ? kUsageError
                                                                : kDomainError);
    engine.emplace(std::move(*loaded.value));
    return kOk;
  }

  int save(const Engine& engine) const {
    Status st = engine.save(chain_path);
    return st.ok() ? kOk : fail_status(st);
  }
};

std::string resolve_sender(const Engine& engine, const std::string& as) {
  return as.empty() ? engine.config().issuer_account : as;
}

/// Submits one transaction, mints the block it lands in, persists the chain,
/// and reports the application outcome.
int run_tx(Session& session, Engine& engine, const std::string& sender,
           TxPayload payload) {
  const SimMs at = engine.ledger().next_block_time_ms();
  SubmitReceipt receipt = engine.submit(sender, at, std::move(payload));
  if (!receipt.accepted) return fail_status(receipt.error);
  auto produced = engine.produce_block(at);
  if (!produced.ok()) return fail_status(produced.status);
  if (int rc = session.save(engine); rc != kOk) return rc;

  const Status* applied = engine.apply_status(receipt.tx_seq);
  ordered_json doc;
  doc["tx_seq"] = receipt.tx_seq;
  doc["block_height"] = *produced.value;
  doc["cpu_charged_us"] = receipt.cpu_charged_us;
  doc["net_charged_bytes"] = receipt.net_charged_bytes;
  doc["status"] = applied ? errc_name(applied->code) : "Ok";
  if (applied && !applied->detail.empty()) doc["detail"] = applied->detail;
  print_doc(doc);
  if (applied && !applied->ok()) {
    print_human(std::string("rejected: ") + errc_name(applied->code) +
                (applied->detail.empty() ? "" : ": " + applied->detail));
    return kDomainError;
  }
  print_human("committed in block " + std::to_string(*produced.value));
  return kOk;
}

/// Journaled console operation: apply, persist, report.
int run_admin(Session& session, Engine& engine, const Status& st,
              ordered_json doc, const std::string& human) {
  if (!st.ok()) return fail_status(st);
  if (int rc = session.save(engine); rc != kOk) return rc;
  doc["status"] = "Ok";
  print_doc(doc);
  print_human(human);
  return kOk;
}

Result<Permission> permission_from_flags(const std::string& id, const std::string& mode,
                                         const std::string& role,
                                         const std::string& action,
                                         const std::string& target,
                                         const std::vector<std::string>& constraints,
                                         const std::string& exception) {
  using R = Result<Permission>;
  Permission p;
  p.identifier = id;
  auto m = parse_mode(mode);
  if (!m) return R::fail(Errc::UsageError, "bad --mode (want A+, A-, O+ or O-)");
  p.mode = *m;
  p.role = role;
  p.action = action;
  p.target = target;
  for (const std::string& text : constraints) {
    auto cond = ContextCondition::parse(text);
    if (!cond.ok()) return R::fail(cond.status);
    p.constraints.push_back(std::move(*cond.value));
  }
  if (!exception.empty()) p.exception = exception;
  return R::success(std::move(p));
}

Result<RequestContext> context_from_flags(const std::vector<std::string>& ctx) {
  using R = Result<RequestContext>;
  RequestContext out;
  for (const std::string& entry : ctx) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      out.active_flags.insert(entry);  // bare name: an exception flag in force
      continue;
    }
    const std::string key = entry.substr(0, eq);
    auto value = parse_typed_value(entry.substr(eq + 1));
    if (!value)
      return R::fail(Errc::UsageError,
                     "bad --ctx value for " + key + " (use i:, s:, d: or t: prefix)");
    out.attributes[key] = std::move(*value);
  }
  return R::success(std::move(out));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"role and permission chain console"};
  app.require_subcommand(1);

  Session session;
  app.add_option("--chain", session.chain_path, "chain state file")
      ->envname("ROLECHAIN_CHAIN");

  int rc = kOk;

  // ---- init -----------------------------------------------------------
  struct {
    std::vector<std::string> producers{"producer1"};
    SimMs interval = 500;
    std::uint32_t turn = 6;
    std::string issuer = "issuer";
    std::uint64_t issuer_stake = 1'000'000;
    std::uint32_t confirm_depth = 1;
    SimMs genesis = 0;
    bool force = false;
  } init_args;
  CLI::App* init = app.add_subcommand("init", "create a fresh chain file");
  init->add_option("--producers", init_args.producers, "producer names");
  init->add_option("--interval", init_args.interval, "block interval, ms");
  init->add_option("--blocks-per-turn", init_args.turn, "blocks per producer turn");
  init->add_option("--issuer", init_args.issuer, "issuing account name");
  init->add_option("--issuer-stake", init_args.issuer_stake, "issuer's staked tokens");
  init->add_option("--confirm-depth", init_args.confirm_depth, "confirmation depth");
  init->add_option("--genesis", init_args.genesis, "genesis timestamp, ms");
  init->add_flag("--force", init_args.force, "overwrite an existing file");
  init->callback([&] {
    if (session.chain_path.empty()) {
      rc = fail_usage("no chain file: pass --chain or set ROLECHAIN_CHAIN");
      return;
    }
    if (!init_args.force && std::filesystem::exists(session.chain_path)) {
      rc = fail_status(
          Status::fail(Errc::IoError, "refusing to overwrite " + session.chain_path));
      return;
    }
    EngineConfig cfg;
    cfg.genesis_time_ms = init_args.genesis;
    cfg.block_interval_ms = init_args.interval;
    cfg.blocks_per_turn = init_args.turn;
    cfg.producers = init_args.producers;
    cfg.issuer_account = init_args.issuer;
    cfg.confirm_depth = init_args.confirm_depth;
    Engine engine(cfg);
    if (Status st = engine.create_account(cfg.issuer_account, init_args.issuer_stake);
        !st.ok()) {
      rc = fail_status(st);
      return;
    }
    ordered_json doc;
    doc["chain"] = session.chain_path;
    doc["issuer"] = cfg.issuer_account;
    doc["producers"] = cfg.producers;
    rc = run_admin(session, engine, Status::success(), std::move(doc),
                   "initialized " + session.chain_path);
  });

  // ---- account --------------------------------------------------------
  CLI::App* account = app.add_subcommand("account", "account management");
  account->require_subcommand(1);

  struct {
    std::string id, key;
    std::uint64_t stake = 0;
  } acc_create;
  CLI::App* account_create = account->add_subcommand("create", "register an account");
  account_create->add_option("--id", acc_create.id)->required();
  account_create->add_option("--stake", acc_create.stake)->required();
  account_create->add_option("--key", acc_create.key, "public key (defaults to id)");
  account_create->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["account"] = acc_create.id;
    rc = run_admin(session, *engine,
                   engine->create_account(acc_create.id, acc_create.stake, acc_create.key),
                   std::move(doc), "created account " + acc_create.id);
  });

  struct {
    std::string id;
    std::uint64_t tokens = 0;
  } acc_stake;
  CLI::App* account_stake = account->add_subcommand("stake", "add staked tokens");
  account_stake->add_option("--id", acc_stake.id)->required();
  account_stake->add_option("--tokens", acc_stake.tokens)->required();
  account_stake->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["account"] = acc_stake.id;
    doc["added_tokens"] = acc_stake.tokens;
    rc = run_admin(session, *engine, engine->add_stake(acc_stake.id, acc_stake.tokens),
                   std::move(doc), "staked " + std::to_string(acc_stake.tokens));
  });

  struct {
    std::string from, to;
    std::uint64_t cpu = 0, net = 0, ram = 0;
  } acc_delegate;
  CLI::App* account_delegate =
      account->add_subcommand("delegate-bw", "lend bandwidth to another account");
  account_delegate->add_option("--from", acc_delegate.from)->required();
  account_delegate->add_option("--to", acc_delegate.to)->required();
  account_delegate->add_option("--cpu", acc_delegate.cpu, "microseconds");
  account_delegate->add_option("--net", acc_delegate.net, "bytes");
  account_delegate->add_option("--ram", acc_delegate.ram, "bytes (always refused)");
  account_delegate->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["from"] = acc_delegate.from;
    doc["to"] = acc_delegate.to;
    rc = run_admin(session, *engine,
                   engine->delegate_bandwidth(acc_delegate.from, acc_delegate.to,
                                              acc_delegate.cpu, acc_delegate.net,
                                              acc_delegate.ram),
                   std::move(doc),
                   "delegated bandwidth " + acc_delegate.from + " -> " + acc_delegate.to);
  });

  // ---- role -----------------------------------------------------------
  CLI::App* role = app.add_subcommand("role", "role relation");
  role->require_subcommand(1);

  struct {
    std::string name;
  } role_create;
  CLI::App* role_create_cmd = role->add_subcommand("create", "register a role name");
  role_create_cmd->add_option("--name", role_create.name)->required();
  role_create_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["role"] = role_create.name;
    rc = run_admin(session, *engine, engine->register_role(role_create.name),
                   std::move(doc), "registered role " + role_create.name);
  });

  struct {
    std::vector<std::string> subjects;
    std::string role_name, as;
  } role_assign;
  CLI::App* role_assign_cmd = role->add_subcommand("assign", "assign a role");
  role_assign_cmd->add_option("--subject", role_assign.subjects, "may repeat")
      ->required();
  role_assign_cmd->add_option("--role", role_assign.role_name)->required();
  role_assign_cmd->add_option("--as", role_assign.as, "signing account");
  role_assign_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    const std::string sender = resolve_sender(*engine, role_assign.as);
    const SimMs at = engine->ledger().next_block_time_ms();
    // a multi-subject assign is sugar: one single-subject transaction each,
    // all landing in the same block
    struct Sub {
      std::string subject;
      std::optional<SubmitReceipt> receipt;
    };
    std::vector<Sub> subs;
    for (const std::string& subject : role_assign.subjects) {
      Sub s{subject, std::nullopt};
      s.receipt =
          engine->submit(sender, at, RoleAssignPayload{subject, role_assign.role_name});
      subs.push_back(std::move(s));  // a rejected sibling never blocks the rest
    }
    auto produced = engine->produce_block(at);
    if (!produced.ok()) {
      rc = fail_status(produced.status);
      return;
    }
    if ((rc = session.save(*engine)) != kOk) return;
    ordered_json results = ordered_json::array();
    bool all_ok = true;
    for (const Sub& s : subs) {
      ordered_json r;
      r["subject"] = s.subject;
      if (!s.receipt->accepted) {
        r["status"] = errc_name(s.receipt->error.code);
        all_ok = false;
      } else {
        const Status* applied = engine->apply_status(s.receipt->tx_seq);
        r["tx_seq"] = s.receipt->tx_seq;
        r["status"] = applied ? errc_name(applied->code) : "Ok";
        if (applied && !applied->detail.empty()) r["detail"] = applied->detail;
        if (applied && !applied->ok()) all_ok = false;
      }
      results.push_back(std::move(r));
    }
    ordered_json doc;
    doc["block_height"] = *produced.value;
    doc["results"] = std::move(results);
    print_doc(doc);
    print_human(all_ok ? "assigned " + role_assign.role_name
                       : "some assignments were rejected");
    rc = all_ok ? kOk : kDomainError;
  });

  struct {
    std::string subject, new_role, old_role, as;
  } role_update;
  CLI::App* role_update_cmd = role->add_subcommand("update", "replace an assignment");
  role_update_cmd->add_option("--subject", role_update.subject)->required();
  role_update_cmd->add_option("--new-role", role_update.new_role)->required();
  role_update_cmd->add_option("--old-role", role_update.old_role,
                              "required when the subject holds several roles");
  role_update_cmd->add_option("--as", role_update.as, "signing account");
  role_update_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    RoleUpdatePayload p;
    p.subject_id = role_update.subject;
    p.new_role = role_update.new_role;
    if (!role_update.old_role.empty()) p.old_role = role_update.old_role;
    rc = run_tx(session, *engine, resolve_sender(*engine, role_update.as), std::move(p));
  });

  struct {
    std::string subject, role_name, as;
    bool strong = false;
  } role_revoke;
  CLI::App* role_revoke_cmd = role->add_subcommand("revoke", "remove an assignment");
  role_revoke_cmd->add_option("--subject", role_revoke.subject)->required();
  role_revoke_cmd->add_option("--role", role_revoke.role_name)->required();
  role_revoke_cmd->add_flag("--strong", role_revoke.strong,
                            "also strip senior roles that reach this one");
  role_revoke_cmd->add_option("--as", role_revoke.as, "signing account");
  role_revoke_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    RoleRevokePayload p;
    p.subject_id = role_revoke.subject;
    p.role_name = role_revoke.role_name;
    p.strength = role_revoke.strong ? RevokeStrength::Strong : RevokeStrength::Weak;
    rc = run_tx(session, *engine, resolve_sender(*engine, role_revoke.as), std::move(p));
  });

  // ---- perm -----------------------------------------------------------
  CLI::App* perm = app.add_subcommand("perm", "permission rows");
  perm->require_subcommand(1);

  struct PermFlags {
    std::string id, mode = "A+", role_name, action, target, exception, as;
    std::vector<std::string> constraints;
  };
  auto add_perm_flags = [](CLI::App* cmd, PermFlags& f) {
    cmd->add_option("--id", f.id)->required();
    cmd->add_option("--mode", f.mode, "A+, A-, O+ or O-");
    cmd->add_option("--role", f.role_name)->required();
    cmd->add_option("--action", f.action)->required();
    cmd->add_option("--target", f.target)->required();
    cmd->add_option("--constraint", f.constraints,
                    "context condition, e.g. \"department eq s:ward3\"; may repeat");
    cmd->add_option("--exception", f.exception,
                    "flag name that overrides a negative authorization");
    cmd->add_option("--as", f.as, "signing account");
  };

  PermFlags perm_assign;
  CLI::App* perm_assign_cmd = perm->add_subcommand("assign", "add a permission row");
  add_perm_flags(perm_assign_cmd, perm_assign);
  perm_assign_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    auto p = permission_from_flags(perm_assign.id, perm_assign.mode, perm_assign.role_name,
                                   perm_assign.action, perm_assign.target,
                                   perm_assign.constraints, perm_assign.exception);
    if (!p.ok()) {
      rc = fail_status(p.status, p.status.code == Errc::UsageError ? kUsageError
                                                                   : kDomainError);
      return;
    }
    rc = run_tx(session, *engine, resolve_sender(*engine, perm_assign.as),
                PermissionAssignPayload{std::move(*p.value)});
  });

  PermFlags perm_update;
  CLI::App* perm_update_cmd = perm->add_subcommand("update", "replace a permission row");
  add_perm_flags(perm_update_cmd, perm_update);
  perm_update_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    auto p = permission_from_flags(perm_update.id, perm_update.mode, perm_update.role_name,
                                   perm_update.action, perm_update.target,
                                   perm_update.constraints, perm_update.exception);
    if (!p.ok()) {
      rc = fail_status(p.status, p.status.code == Errc::UsageError ? kUsageError
                                                                   : kDomainError);
      return;
    }
    rc = run_tx(session, *engine, resolve_sender(*engine, perm_update.as),
                PermissionUpdatePayload{std::move(*p.value)});
  });

  struct {
    std::string role_name, as;
  } perm_revoke;
  CLI::App* perm_revoke_cmd =
      perm->add_subcommand("revoke", "remove every row of a role");
  perm_revoke_cmd->add_option("--role", perm_revoke.role_name)->required();
  perm_revoke_cmd->add_option("--as", perm_revoke.as, "signing account");
  perm_revoke_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    rc = run_tx(session, *engine, resolve_sender(*engine, perm_revoke.as),
                PermissionRevokePayload{perm_revoke.role_name});
  });

  // ---- delegate -------------------------------------------------------
  CLI::App* delegate = app.add_subcommand("delegate", "role delegation");
  delegate->require_subcommand(1);

  struct {
    std::string delegator, delegate_to, role_name, mode = "grant", as;
    std::optional<SimMs> expiry, start;
    bool multi_step = false;
    std::uint32_t levels = 1;
  } dlg_create;
  CLI::App* delegate_create = delegate->add_subcommand("create", "delegate a role");
  delegate_create->add_option("--delegator", dlg_create.delegator)->required();
  delegate_create->add_option("--delegate", dlg_create.delegate_to)->required();
  delegate_create->add_option("--role", dlg_create.role_name)->required();
  delegate_create->add_option("--expiry", dlg_create.expiry, "dead from this time, ms");
  delegate_create->add_option("--start", dlg_create.start, "inactive before this, ms");
  delegate_create->add_option("--mode", dlg_create.mode, "grant or transfer");
  delegate_create->add_flag("--multi-step", dlg_create.multi_step,
                            "allow re-delegation");
  delegate_create->add_option("--levels", dlg_create.levels, "re-delegation depth");
  delegate_create->add_option("--as", dlg_create.as,
                              "signing account (defaults to the delegator)");
  delegate_create->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    auto mode = parse_delegation_mode(dlg_create.mode);
    if (!mode) {
      rc = fail_usage("bad --mode (want grant or transfer)");
      return;
    }
    RightTransferPayload p;
    p.delegator = dlg_create.delegator;
    p.delegate = dlg_create.delegate_to;
    p.role = dlg_create.role_name;
    p.expiry_ms = dlg_create.expiry;
    p.start_ms = dlg_create.start;
    p.mode = *mode;
    p.multi_step_delegatable = dlg_create.multi_step;
    p.levels_of_delegation = dlg_create.levels;
    const std::string sender =
        dlg_create.as.empty() ? dlg_create.delegator : dlg_create.as;
    rc = run_tx(session, *engine, sender, std::move(p));
  });

  struct {
    std::uint64_t id = 0;
    std::string as;
  } dlg_remove;
  CLI::App* delegate_remove =
      delegate->add_subcommand("remove", "revoke a delegation and its chain");
  delegate_remove->add_option("--id", dlg_remove.id)->required();
  delegate_remove->add_option("--as", dlg_remove.as, "signing account");
  delegate_remove->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    rc = run_tx(session, *engine, resolve_sender(*engine, dlg_remove.as),
                RemoveRightTransferPayload{dlg_remove.id});
  });

  // ---- hierarchy ------------------------------------------------------
  CLI::App* hierarchy = app.add_subcommand("hierarchy", "role seniority graph");
  hierarchy->require_subcommand(1);

  struct {
    std::string senior, junior;
  } edge;
  CLI::App* add_edge = hierarchy->add_subcommand("add-edge", "senior inherits junior");
  add_edge->add_option("--senior", edge.senior)->required();
  add_edge->add_option("--junior", edge.junior)->required();
  add_edge->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["senior"] = edge.senior;
    doc["junior"] = edge.junior;
    rc = run_admin(session, *engine, engine->add_hierarchy_edge(edge.senior, edge.junior),
                   std::move(doc), "added edge " + edge.senior + " -> " + edge.junior);
  });

  // ---- constraint -----------------------------------------------------
  CLI::App* constraint = app.add_subcommand("constraint", "separation-of-duty rules");
  constraint->require_subcommand(1);

  struct {
    std::string id, body;
  } sod;
  CLI::App* add_sod = constraint->add_subcommand("add-sod", "register a rule body");
  add_sod->add_option("--id", sod.id)->required();
  add_sod->add_option("--body", sod.body,
                      "forbidden conjunction, e.g. \"play(?s, a); play(?s, b)\"")
      ->required();
  add_sod->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["rule_id"] = sod.id;
    rc = run_admin(session, *engine, engine->add_sod_rule(sod.id, sod.body),
                   std::move(doc), "registered rule " + sod.id);
  });

  struct {
    std::string role_a, role_b;
  } pair_args;
  CLI::App* add_pair =
      constraint->add_subcommand("add-pair", "mutually exclusive role pair");
  add_pair->add_option("--role-a", pair_args.role_a)->required();
  add_pair->add_option("--role-b", pair_args.role_b)->required();
  add_pair->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["role_a"] = pair_args.role_a;
    doc["role_b"] = pair_args.role_b;
    rc = run_admin(session, *engine,
                   engine->add_mutual_exclusion(pair_args.role_a, pair_args.role_b),
                   std::move(doc),
                   "roles " + pair_args.role_a + " and " + pair_args.role_b +
                       " are now exclusive");
  });

  struct {
    std::uint32_t max = 0;
  } card;
  CLI::App* add_card =
      constraint->add_subcommand("add-cardinality", "cap explicit roles per subject");
  add_card->add_option("--max", card.max)->required();
  add_card->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["max_roles_per_subject"] = card.max;
    rc = run_admin(session, *engine, engine->set_cardinality(card.max), std::move(doc),
                   "cardinality bound set to " + std::to_string(card.max));
  });

  struct {
    std::string junior, senior;
  } junior_fact;
  CLI::App* add_junior =
      constraint->add_subcommand("add-junior", "register a subject seniority fact");
  add_junior->add_option("--junior", junior_fact.junior)->required();
  add_junior->add_option("--senior", junior_fact.senior)->required();
  add_junior->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["junior"] = junior_fact.junior;
    doc["senior"] = junior_fact.senior;
    rc = run_admin(session, *engine,
                   engine->add_junior_fact(junior_fact.junior, junior_fact.senior),
                   std::move(doc), "registered seniority fact");
  });

  struct {
    std::string stronger, weaker;
  } imply_fact;
  CLI::App* add_imply =
      constraint->add_subcommand("add-imply", "register a right implication fact");
  add_imply->add_option("--stronger", imply_fact.stronger)->required();
  add_imply->add_option("--weaker", imply_fact.weaker)->required();
  add_imply->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    ordered_json doc;
    doc["stronger"] = imply_fact.stronger;
    doc["weaker"] = imply_fact.weaker;
    rc = run_admin(session, *engine,
                   engine->add_imply_fact(imply_fact.stronger, imply_fact.weaker),
                   std::move(doc), "registered implication fact");
  });

  // ---- check ----------------------------------------------------------
  struct {
    std::string subject, op, object, as;
    std::vector<std::string> ctx;
    std::optional<SimMs> at;
  } check;
  CLI::App* check_cmd = app.add_subcommand("check", "run an access check on chain");
  check_cmd->add_option("--subject", check.subject)->required();
  check_cmd->add_option("--op", check.op)->required();
  check_cmd->add_option("--object", check.object)->required();
  check_cmd->add_option("--ctx", check.ctx,
                        "attribute k=i:42|s:text|d:YYYY-MM-DD|t:HH:MM, or a bare "
                        "flag name; may repeat");
  check_cmd->add_option("--at", check.at, "evaluation time, ms");
  check_cmd->add_option("--as", check.as, "signing account");
  check_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    auto ctx = context_from_flags(check.ctx);
    if (!ctx.ok()) {
      rc = fail_status(ctx.status, kUsageError);
      return;
    }
    CheckAccessPayload p;
    p.subject_id = check.subject;
    p.operation = check.op;
    p.object = check.object;
    p.context = std::move(*ctx.value);
    p.at_ms = check.at;

    const SimMs at = engine->ledger().next_block_time_ms();
    SubmitReceipt receipt =
        engine->submit(resolve_sender(*engine, check.as), at, std::move(p));
    if (!receipt.accepted) {
      rc = fail_status(receipt.error);
      return;
    }
    auto produced = engine->produce_block(at);
    if (!produced.ok()) {
      rc = fail_status(produced.status);
      return;
    }
    if ((rc = session.save(*engine)) != kOk) return;
    const Decision* decision = engine->decision_for(receipt.tx_seq);
    if (!decision) {
      rc = fail_status(Status::fail(Errc::ParseError, "no decision recorded"));
      return;
    }
    ordered_json doc = decision_to_json(*decision);
    doc["tx_seq"] = receipt.tx_seq;
    doc["block_height"] = *produced.value;
    print_doc(doc);
    print_human(decision->allowed
                    ? "allowed (" + std::string(reason_name(decision->reason)) + ")"
                    : "denied (" + std::string(reason_name(decision->reason)) + ")");
    rc = decision->allowed ? kOk : kDomainError;
  });

  // ---- audit ----------------------------------------------------------
  struct {
    std::string subject, export_path;
    std::optional<SimMs> from, to;
    std::optional<bool> allowed;
    bool include_system = false;
  } audit_args;
  CLI::App* audit_cmd = app.add_subcommand("audit", "query the event journal");
  audit_cmd->add_option("--subject", audit_args.subject);
  audit_cmd->add_option("--from", audit_args.from, "inclusive, ms");
  audit_cmd->add_option("--to", audit_args.to, "inclusive, ms");
  audit_cmd->add_option("--allowed", audit_args.allowed, "true or false");
  audit_cmd->add_flag("--include-system", audit_args.include_system,
                      "include console and expiry entries");
  audit_cmd->add_option("--export", audit_args.export_path,
                        "write the full journal to this JSON-lines file");
  audit_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    AuditFilter filter;
    filter.include_system = audit_args.include_system;
    if (!audit_args.subject.empty()) filter.subject = audit_args.subject;
    filter.from_ms = audit_args.from;
    filter.to_ms = audit_args.to;
    filter.allowed = audit_args.allowed;
    std::vector<AuditEvent> events = engine->audit().query(filter);
    ordered_json doc;
    ordered_json arr = ordered_json::array();
    for (const AuditEvent& e : events) arr.push_back(audit_event_to_json(e));
    doc["count"] = events.size();
    doc["events"] = std::move(arr);
    if (!audit_args.export_path.empty()) {
      Status st = engine->audit().export_jsonl(audit_args.export_path);
      if (!st.ok()) {
        rc = fail_status(st);
        return;
      }
      doc["exported"] = audit_args.export_path;
    }
    print_doc(doc);
    print_human(std::to_string(events.size()) + " event(s)");
    rc = kOk;
  });

  // ---- redundancy -----------------------------------------------------
  CLI::App* redundancy_cmd =
      app.add_subcommand("redundancy", "find redundant assignments and rows");
  redundancy_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    RedundancyReport report = engine->detect_redundancy();
    print_doc(report.to_json());
    print_human(report.empty()
                    ? "no redundancy found"
                    : std::to_string(report.role_pairs.size()) + " redundant pair(s), " +
                          std::to_string(report.duplicate_permissions.size()) +
                          " duplicated right(s)");
    rc = kOk;
  });

  // ---- policy ---------------------------------------------------------
  CLI::App* policy = app.add_subcommand("policy", "policy state");
  policy->require_subcommand(1);
  CLI::App* snapshot_cmd = policy->add_subcommand("snapshot", "full relational dump");
  snapshot_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    print_doc(engine->policy_snapshot());
    print_human("snapshot of " + session.chain_path);
    rc = kOk;
  });

  // ---- chain ----------------------------------------------------------
  CLI::App* chain = app.add_subcommand("chain", "chain integrity and export");
  chain->require_subcommand(1);

  CLI::App* verify_cmd = chain->add_subcommand("verify", "re-hash and link-check");
  verify_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    const bool valid = engine->ledger().verify_chain();
    ordered_json doc;
    doc["valid"] = valid;
    doc["height"] = engine->ledger().height();
    print_doc(doc);
    print_human(valid ? "chain intact" : "chain BROKEN");
    rc = valid ? kOk : kDomainError;
  });

  struct {
    std::string out;
  } export_args;
  CLI::App* export_cmd = chain->add_subcommand("export", "write the state file");
  export_cmd->add_option("--out", export_args.out)->required();
  export_cmd->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    Status st = engine->save(export_args.out);
    if (!st.ok()) {
      rc = fail_status(st);
      return;
    }
    ordered_json doc;
    doc["exported"] = export_args.out;
    doc["height"] = engine->ledger().height();
    print_doc(doc);
    print_human("exported to " + export_args.out);
    rc = kOk;
  });

  CLI::App* replay_cmd = chain->add_subcommand(
      "replay", "re-run every recorded transaction and compare block hashes");
  replay_cmd->callback([&] {
    if (session.chain_path.empty()) {
      rc = fail_usage("no chain file: pass --chain or set ROLECHAIN_CHAIN");
      return;
    }
    auto replayed = Engine::load(session.chain_path, LoadMode::Reproduce);
    if (!replayed.ok()) {
      rc = fail_status(replayed.status);
      return;
    }
    ordered_json doc;
    doc["replayed"] = true;
    doc["height"] = replayed.value->ledger().height();
    print_doc(doc);
    print_human("replay matched all block hashes");
    rc = kOk;
  });

  // ---- bundle ---------------------------------------------------------
  CLI::App* bundle = app.add_subcommand("bundle", "batched transaction files");
  bundle->require_subcommand(1);
  struct {
    std::string file;
  } bundle_args;
  CLI::App* bundle_load =
      bundle->add_subcommand("load", "apply a JSON-lines transaction file");
  bundle_load->add_option("--file", bundle_args.file)->required();
  bundle_load->callback([&] {
    std::optional<Engine> engine;
    if ((rc = session.open_or_fail(engine)) != kOk) return;
    BundleOutcome outcome = load_bundle(*engine, bundle_args.file);
    // blocks already minted stay minted even when a later line fails
    if ((rc = session.save(*engine)) != kOk) return;
    print_doc(outcome.to_json());
    if (outcome.ok()) {
      print_human("applied " + std::to_string(outcome.applied) + " transaction(s)");
      rc = kOk;
    } else {
      print_human("failed at line " +
                  (outcome.failed_line ? std::to_string(*outcome.failed_line)
                                       : std::string("?")) +
                  ": " + errc_name(outcome.error.code));
      rc = kDomainError;
    }
  });

  // ---- bench ----------------------------------------------------------
  CLI::App* bench = app.add_subcommand("bench", "reproducible load runs");
  bench->require_subcommand(1);
  struct {
    std::string scenario_path, timeline_csv;
  } bench_args;
  CLI::App* bench_run = bench->add_subcommand("run", "run a scenario file");
  bench_run->add_option("scenario", bench_args.scenario_path, "scenario JSON file")
      ->required();
  bench_run->add_option("--timeline-csv", bench_args.timeline_csv,
                        "also write the first repetition's timeline");
  bench_run->callback([&] {
    auto scenario = load_scenario(bench_args.scenario_path);
    if (!scenario.ok()) {
      rc = fail_status(scenario.status);
      return;
    }
    auto report = run_benchmark(*scenario.value);
    if (!report.ok()) {
      rc = fail_status(report.status);
      return;
    }
    if (!bench_args.timeline_csv.empty() && !report.value->repetitions.empty()) {
      Status st = save_timeline_csv(bench_args.timeline_csv,
                                    report.value->repetitions.front().timeline);
      if (!st.ok()) {
        rc = fail_status(st);
        return;
      }
    }
    print_doc(report.value->to_json());
    print_human("ran " + std::to_string(report.value->repetitions.size()) +
                " repetition(s) of " + scenario.value->name);
    rc = kOk;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int parse_rc = app.exit(e);
    return parse_rc == 0 ? kOk : kUsageError;
  }
  return rc;
}
