#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/context.hpp"

namespace rolechain {

inline constexpr std::size_t kMaxAccountNameLen = 12;

struct BandwidthGrant {
  std::string to;
  std::uint64_t cpu_us = 0;
  std::uint64_t net_bytes = 0;
};

struct Account {
  std::string id;          // short account name, at most 12 characters
  std::string public_key;  // opaque key identifier; doubles as the subject id
  std::uint64_t staked_tokens = 0;

  // RAM is granted by stake and never delegable.
  std::uint64_t ram_bytes = 0;
  std::uint64_t used_ram_bytes = 0;

  std::vector<BandwidthGrant> delegated_out;

  // Computed from stake share and grants; refreshed on every stake change.
  std::int64_t cpu_capacity_us = 0;
  std::int64_t net_capacity_bytes = 0;

  // Consumption within the current accounting window.
  std::uint64_t used_cpu_us = 0;
  std::uint64_t used_net_bytes = 0;
  std::uint64_t window_index = 0;

  std::uint64_t remaining_cpu_us() const;
  std::uint64_t remaining_net_bytes() const;
};

/// Account registry with stake-proportional CPU/NET budgets. Budgets refill
/// at each accounting-window boundary (one producer turn); charging happens
/// at transaction submission.
class AccountLedger {
 public:
  AccountLedger() = default;
  AccountLedger(std::uint64_t system_cpu_capacity_us,
                std::uint64_t system_net_capacity_bytes,
                std::uint64_t ram_bytes_per_token);

  Status create(const std::string& id, const std::string& public_key,
                std::uint64_t staked_tokens);
  Status add_stake(const std::string& id, std::uint64_t tokens);
  Status delegate_bandwidth(const std::string& from, const std::string& to,
                            std::uint64_t cpu_us, std::uint64_t net_bytes,
                            std::uint64_t ram_bytes = 0);

  /// Debits one transaction's cost, resetting consumption first when the
  /// account enters a new accounting window.
  Status charge(const std::string& id, std::uint64_t cpu_us, std::uint64_t net_bytes,
                std::uint64_t window_index);
  Status charge_ram(const std::string& id, std::uint64_t bytes);
  void refund_ram(const std::string& id, std::uint64_t bytes);

  const Account* find(const std::string& id) const;
  const std::map<std::string, Account>& all() const { return accounts_; }
  std::uint64_t total_staked() const;
  /// Sum of per-account capacities; invariant under bandwidth delegation.
  std::int64_t total_cpu_capacity() const;
  std::int64_t total_net_capacity() const;

  std::uint64_t system_cpu_capacity_us() const { return system_cpu_capacity_us_; }
  std::uint64_t system_net_capacity_bytes() const { return system_net_capacity_bytes_; }

 private:
  void recompute_budgets();
  Account* find_mut(const std::string& id);

  std::map<std::string, Account> accounts_;
  std::uint64_t system_cpu_capacity_us_ = 1'000'000'000;
  std::uint64_t system_net_capacity_bytes_ = 1'000'000'000;
  std::uint64_t ram_bytes_per_token_ = 1024;
};

}  // namespace rolechain
