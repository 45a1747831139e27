#include "rolechain/ledger.hpp"

#include <cassert>
#include <utility>

namespace rolechain {

const std::string& ProducerSchedule::producer_at(std::uint64_t height) const {
  assert(!producers.empty());
  const std::uint64_t turn = height / blocks_per_turn;
  return producers[turn % producers.size()];
}

Ledger::Ledger(SimMs genesis_time_ms, ProducerSchedule schedule, ResourceTariff tariff,
               AccountLedger accounts, bool produce_genesis)
    : genesis_time_ms_(genesis_time_ms),
      schedule_(std::move(schedule)),
      tariff_(std::move(tariff)),
      accounts_(std::move(accounts)) {
  assert(!schedule_.producers.empty());
  if (produce_genesis) {
    Block genesis;
    genesis.height = 0;
    genesis.producer = schedule_.producer_at(0);
    genesis.timestamp_ms = genesis_time_ms_;
    genesis.block_hash = compute_block_hash(genesis);
    blocks_.push_back(std::move(genesis));
  }
}

std::uint64_t Ledger::window_index_of(SimMs at) const {
  if (at < genesis_time_ms_) return 0;
  return (at - genesis_time_ms_) / schedule_.window_length_ms();
}

SubmitReceipt Ledger::submit_transaction(const Transaction& tx) {
  SubmitReceipt receipt;
  if (accounts_.find(tx.sender) == nullptr) {
    receipt.error = Status::fail(Errc::UnknownAccount, tx.sender);
    return receipt;
  }
  if (!signature_valid(tx)) {
    receipt.error = Status::fail(Errc::BadSignature, tx.sender);
    return receipt;
  }
  const KindCost cost = tariff_.cost_of(tx.kind);
  Status charged = accounts_.charge(tx.sender, cost.cpu_us, cost.net_bytes,
                                    window_index_of(tx.submitted_at_ms));
  if (!charged.ok()) {
    receipt.error = std::move(charged);
    return receipt;
  }
  receipt.accepted = true;
  receipt.cpu_charged_us = cost.cpu_us;
  receipt.net_charged_bytes = cost.net_bytes;
  receipt.tx_seq = next_seq_++;
  pool_.push_back(PendingTx{receipt.tx_seq, tx,
                            static_cast<std::int64_t>(cost.cpu_us),
                            static_cast<std::int64_t>(cost.net_bytes)});
  return receipt;
}

Result<std::uint64_t> Ledger::produce_block(SimMs now, const TxApplier& applier) {
  using R = Result<std::uint64_t>;
  if (!blocks_.empty() && now < tip().timestamp_ms)
    return R::fail(Errc::ClockRegression,
                   "now " + std::to_string(now) + " < tip " +
                       std::to_string(tip().timestamp_ms));
  const std::uint64_t next_height = blocks_.size();
  const SimMs due_at =
      genesis_time_ms_ + next_height * schedule_.block_interval_ms;
  if (now < due_at)
    return R::fail(Errc::BlockNotDue, "next block due at " + std::to_string(due_at));

  Block block;
  block.height = next_height;
  block.producer = schedule_.producer_at(next_height);
  block.timestamp_ms = due_at;  // slot time, not submission time
  if (!blocks_.empty()) block.prev_hash = tip().block_hash;

  std::vector<PendingTx> committed;
  if (missing_.count(block.producer) == 0) {
    while (!pool_.empty()) {
      committed.push_back(std::move(pool_.front()));
      pool_.pop_front();
    }
    for (const PendingTx& p : committed) block.tx_list.push_back(p.tx);
  }
  block.block_hash = compute_block_hash(block);
  blocks_.push_back(block);

  for (std::size_t i = 0; i < committed.size(); ++i) {
    ApplyContext ctx;
    ctx.tx_seq = committed[i].seq;
    ctx.block_height = block.height;
    ctx.block_time_ms = block.timestamp_ms;
    ctx.tx_index = i;
    ctx.cpu_charged_us = committed[i].cpu_charged_us;
    ctx.net_charged_bytes = committed[i].net_charged_bytes;
    applier(committed[i].tx, ctx);
  }
  return R::success(block.height);
}

Result<std::uint64_t> Ledger::produce_until(SimMs now, const TxApplier& applier) {
  using R = Result<std::uint64_t>;
  std::uint64_t produced = 0;
  while (next_block_time_ms() <= now) {
    auto r = produce_block(now, applier);
    if (!r.ok()) return R::fail(r.status);
    ++produced;
  }
  return R::success(std::move(produced));
}

void Ledger::adopt_block(const Block& block, const TxApplier& applier) {
  blocks_.push_back(block);
  for (std::size_t i = 0; i < block.tx_list.size(); ++i) {
    const Transaction& tx = block.tx_list[i];
    const KindCost cost = tariff_.cost_of(tx.kind);
    // Re-debit the historical submission charge so budgets line up with the
    // original timeline; failures are tolerated (the chain may be tampered).
    (void)accounts_.charge(tx.sender, cost.cpu_us, cost.net_bytes,
                           window_index_of(tx.submitted_at_ms));
    ApplyContext ctx;
    ctx.tx_seq = next_seq_++;
    ctx.block_height = block.height;
    ctx.block_time_ms = block.timestamp_ms;
    ctx.tx_index = i;
    ctx.cpu_charged_us = cost.cpu_us;
    ctx.net_charged_bytes = cost.net_bytes;
    applier(tx, ctx);
  }
}

void Ledger::mark_producer_missing(const std::string& name, bool missing) {
  if (missing)
    missing_.insert(name);
  else
    missing_.erase(name);
}

}  // namespace rolechain
