#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "rolechain/account.hpp"
#include "rolechain/block.hpp"
#include "rolechain/tariff.hpp"
#include "rolechain/transaction.hpp"

namespace rolechain {

/// Round-robin block production: each producer owns `blocks_per_turn`
/// consecutive slots before the turn passes to the next one.
struct ProducerSchedule {
  std::vector<std::string> producers;
  std::uint32_t blocks_per_turn = 6;
  SimMs block_interval_ms = 500;

  const std::string& producer_at(std::uint64_t height) const;
  SimMs window_length_ms() const {
    return static_cast<SimMs>(blocks_per_turn) * block_interval_ms;
  }
};

struct SubmitReceipt {
  bool accepted = false;
  Status error;
  std::int64_t cpu_charged_us = 0;
  std::int64_t net_charged_bytes = 0;
  std::uint64_t tx_seq = 0;  // valid only when accepted
};

struct PendingTx {
  std::uint64_t seq = 0;
  Transaction tx;
  std::int64_t cpu_charged_us = 0;
  std::int64_t net_charged_bytes = 0;
};

/// Passed to the application callback alongside each committed transaction.
struct ApplyContext {
  std::uint64_t tx_seq = 0;
  std::uint64_t block_height = 0;
  SimMs block_time_ms = 0;
  std::size_t tx_index = 0;
  std::int64_t cpu_charged_us = 0;
  std::int64_t net_charged_bytes = 0;
};

using TxApplier = std::function<void(const Transaction&, const ApplyContext&)>;

/// Hash-linked block chain with a FIFO transaction pool. Resources are
/// charged when a transaction enters the pool; state transitions happen via
/// the caller's applier when the transaction is committed in a block.
class Ledger {
 public:
  Ledger(SimMs genesis_time_ms, ProducerSchedule schedule, ResourceTariff tariff,
         AccountLedger accounts, bool produce_genesis = true);

  /// Validates sender + signature, debits the sender's cpu/net budget for the
  /// submission-time window, and queues the transaction.
  SubmitReceipt submit_transaction(const Transaction& tx);

  /// Produces the next block if its slot time has arrived. The block drains
  /// the pool unless the slot owner is marked missing, in which case an empty
  /// block is minted and the pool is left intact. The applier runs once per
  /// committed transaction, after the block is appended.
  Result<std::uint64_t> produce_block(SimMs now, const TxApplier& applier);

  /// Produces every block due at or before `now`; returns how many.
  Result<std::uint64_t> produce_until(SimMs now, const TxApplier& applier);

  /// Appends a block verbatim (no hash check, so tampered chains can be
  /// loaded and then reported by verify_chain) and applies its transactions.
  void adopt_block(const Block& block, const TxApplier& applier);

  bool verify_chain() const { return verify_blocks(blocks_); }

  void mark_producer_missing(const std::string& name, bool missing);
  bool producer_missing(const std::string& name) const {
    return missing_.count(name) > 0;
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& tip() const { return blocks_.back(); }
  std::uint64_t height() const { return blocks_.size() - 1; }
  const std::deque<PendingTx>& pool() const { return pool_; }

  SimMs genesis_time_ms() const { return genesis_time_ms_; }
  const ProducerSchedule& schedule() const { return schedule_; }
  const ResourceTariff& tariff() const { return tariff_; }
  AccountLedger& accounts() { return accounts_; }
  const AccountLedger& accounts() const { return accounts_; }

  /// Budget-refill window containing `at`; windows are one producer turn long.
  std::uint64_t window_index_of(SimMs at) const;
  SimMs next_block_time_ms() const {
    return genesis_time_ms_ + static_cast<SimMs>(blocks_.size()) * schedule_.block_interval_ms;
  }

 private:
  SimMs genesis_time_ms_;
  ProducerSchedule schedule_;
  ResourceTariff tariff_;
  AccountLedger accounts_;
  std::vector<Block> blocks_;
  std::deque<PendingTx> pool_;
  std::set<std::string> missing_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace rolechain
