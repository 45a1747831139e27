#include "rolechain/bundle.hpp"

#include <fstream>

namespace rolechain {

ordered_json BundleOutcome::to_json() const {
  ordered_json j;
  j["applied"] = applied;
  if (failed_line)
    j["failed_line"] = *failed_line;
  else
    j["failed_line"] = nullptr;
  if (error.ok()) {
    j["error"] = nullptr;
  } else {
    ordered_json e;
    e["code"] = errc_name(error.code);
    if (!error.detail.empty()) e["detail"] = error.detail;
    j["error"] = std::move(e);
  }
  return j;
}

namespace {

Result<Transaction> transaction_from_lenient_json(const ordered_json& j,
                                                  SimMs default_at_ms) {
  using R = Result<Transaction>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "line must hold an object");
  for (const char* key : {"kind", "sender", "payload"})
    if (!j.contains(key))
      return R::fail(Errc::ParseError, std::string("transaction missing field ") + key);
  auto kind = parse_tx_kind(j["kind"].get<std::string>());
  if (!kind)
    return R::fail(Errc::ParseError,
                   "unknown transaction kind: " + j["kind"].get<std::string>());
  auto payload = payload_from_json(*kind, j["payload"]);
  if (!payload.ok()) return R::fail(payload.status);

  Transaction tx;
  tx.kind = *kind;
  tx.sender = j["sender"].get<std::string>();
  tx.submitted_at_ms =
      j.contains("submitted_at_ms") ? j["submitted_at_ms"].get<SimMs>() : default_at_ms;
  tx.payload = std::move(*payload.value);
  tx.signature = j.contains("signature")
                     ? j["signature"].get<std::string>()
                     : compute_signature(tx.sender, tx.kind, tx.payload);
  return R::success(std::move(tx));
}

}  // namespace

BundleOutcome load_bundle(Engine& engine, const std::string& path) {
  BundleOutcome outcome;
  std::ifstream in(path);
  if (!in) {
    outcome.error = Status::fail(Errc::IoError, "cannot open " + path);
    return outcome;
  }
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      outcome.failed_line = line_no;
      outcome.error = Status::fail(Errc::ParseError, "bad json");
      return outcome;
    }
    auto tx = transaction_from_lenient_json(j, engine.ledger().next_block_time_ms());
    if (!tx.ok()) {
      outcome.failed_line = line_no;
      outcome.error = tx.status;
      return outcome;
    }
    SubmitReceipt receipt = engine.submit(*tx.value);
    if (!receipt.accepted) {
      outcome.failed_line = line_no;
      outcome.error = receipt.error;
      return outcome;
    }
    auto produced = engine.produce_block(engine.ledger().next_block_time_ms());
    if (!produced.ok()) {
      outcome.failed_line = line_no;
      outcome.error = produced.status;
      return outcome;
    }
    const Status* applied = engine.apply_status(receipt.tx_seq);
    if (!applied) {
      outcome.failed_line = line_no;
      outcome.error = Status::fail(Errc::ParseError, "transaction was not committed");
      return outcome;
    }
    if (!applied->ok()) {
      outcome.failed_line = line_no;
      outcome.error = *applied;
      return outcome;
    }
    ++outcome.applied;
  }
  return outcome;
}

}  // namespace rolechain
