#include "rolechain/account.hpp"

namespace rolechain {

std::uint64_t Account::remaining_cpu_us() const {
  std::int64_t cap = cpu_capacity_us < 0 ? 0 : cpu_capacity_us;
  std::uint64_t ucap = static_cast<std::uint64_t>(cap);
  return used_cpu_us >= ucap ? 0 : ucap - used_cpu_us;
}

std::uint64_t Account::remaining_net_bytes() const {
  std::int64_t cap = net_capacity_bytes < 0 ? 0 : net_capacity_bytes;
  std::uint64_t ucap = static_cast<std::uint64_t>(cap);
  return used_net_bytes >= ucap ? 0 : ucap - used_net_bytes;
}

AccountLedger::AccountLedger(std::uint64_t system_cpu_capacity_us,
                             std::uint64_t system_net_capacity_bytes,
                             std::uint64_t ram_bytes_per_token)
    : system_cpu_capacity_us_(system_cpu_capacity_us),
      system_net_capacity_bytes_(system_net_capacity_bytes),
      ram_bytes_per_token_(ram_bytes_per_token) {}

Status AccountLedger::create(const std::string& id, const std::string& public_key,
                             std::uint64_t staked_tokens) {
  if (id.empty() || id.size() > kMaxAccountNameLen)
    return Status::fail(Errc::InvalidAccountName,
                        "account names are 1-12 characters: " + id);
  if (accounts_.count(id))
    return Status::fail(Errc::DuplicateAccount, id);
  Account a;
  a.id = id;
  a.public_key = public_key.empty() ? id : public_key;
  a.staked_tokens = staked_tokens;
  accounts_.emplace(id, std::move(a));
  recompute_budgets();
  return Status::success();
}

Status AccountLedger::add_stake(const std::string& id, std::uint64_t tokens) {
  Account* a = find_mut(id);
  if (!a) return Status::fail(Errc::UnknownAccount, id);
  a->staked_tokens += tokens;
  recompute_budgets();
  return Status::success();
}

Status AccountLedger::delegate_bandwidth(const std::string& from, const std::string& to,
                                         std::uint64_t cpu_us, std::uint64_t net_bytes,
                                         std::uint64_t ram_bytes) {
  if (ram_bytes > 0)
    return Status::fail(Errc::RamDelegationForbidden, "RAM is never delegable");
  Account* src = find_mut(from);
  if (!src) return Status::fail(Errc::UnknownAccount, from);
  Account* dst = find_mut(to);
  if (!dst) return Status::fail(Errc::UnknownAccount, to);
  if (cpu_us == 0 && net_bytes == 0) return Status::success();  // no-op grant

  if (src->cpu_capacity_us < static_cast<std::int64_t>(cpu_us) ||
      src->net_capacity_bytes < static_cast<std::int64_t>(net_bytes))
    return Status::fail(Errc::InsufficientResources,
                        from + " does not hold the resources being delegated");

  src->delegated_out.push_back({to, cpu_us, net_bytes});
  recompute_budgets();
  return Status::success();
}

Status AccountLedger::charge(const std::string& id, std::uint64_t cpu_us,
                             std::uint64_t net_bytes, std::uint64_t window_index) {
  Account* a = find_mut(id);
  if (!a) return Status::fail(Errc::UnknownAccount, id);
  if (a->window_index != window_index) {  // budgets refill at the turn boundary
    a->window_index = window_index;
    a->used_cpu_us = 0;
    a->used_net_bytes = 0;
  }
  if (a->remaining_cpu_us() < cpu_us || a->remaining_net_bytes() < net_bytes)
    return Status::fail(Errc::InsufficientResources,
                        id + " lacks CPU or NET for this transaction");
  a->used_cpu_us += cpu_us;
  a->used_net_bytes += net_bytes;
  return Status::success();
}

Status AccountLedger::charge_ram(const std::string& id, std::uint64_t bytes) {
  Account* a = find_mut(id);
  if (!a) return Status::fail(Errc::UnknownAccount, id);
  if (a->used_ram_bytes + bytes > a->ram_bytes)
    return Status::fail(Errc::InsufficientResources, id + " lacks RAM");
  a->used_ram_bytes += bytes;
  return Status::success();
}

void AccountLedger::refund_ram(const std::string& id, std::uint64_t bytes) {
  Account* a = find_mut(id);
  if (!a) return;
  a->used_ram_bytes = a->used_ram_bytes >= bytes ? a->used_ram_bytes - bytes : 0;
}

const Account* AccountLedger::find(const std::string& id) const {
  auto it = accounts_.find(id);
  return it == accounts_.end() ? nullptr : &it->second;
}

Account* AccountLedger::find_mut(const std::string& id) {
  auto it = accounts_.find(id);
  return it == accounts_.end() ? nullptr : &it->second;
}

std::uint64_t AccountLedger::total_staked() const {
  std::uint64_t total = 0;
  for (const auto& [_, a] : accounts_) total += a.staked_tokens;
  return total;
}

std::int64_t AccountLedger::total_cpu_capacity() const {
  std::int64_t total = 0;
  for (const auto& [_, a] : accounts_) total += a.cpu_capacity_us;
  return total;
}

std::int64_t AccountLedger::total_net_capacity() const {
  std::int64_t total = 0;
  for (const auto& [_, a] : accounts_) total += a.net_capacity_bytes;
  return total;
}

void AccountLedger::recompute_budgets() {
  std::uint64_t total = total_staked();
  // Proportional share first…
  for (auto& [_, a] : accounts_) {
    if (total == 0) {
      a.cpu_capacity_us = 0;
      a.net_capacity_bytes = 0;
    } else {
      a.cpu_capacity_us = static_cast<std::int64_t>(
          static_cast<unsigned __int128>(system_cpu_capacity_us_) * a.staked_tokens /
          total);
      a.net_capacity_bytes = static_cast<std::int64_t>(
          static_cast<unsigned __int128>(system_net_capacity_bytes_) * a.staked_tokens /
          total);
    }
    a.ram_bytes = a.staked_tokens * ram_bytes_per_token_;
  }
  // …then shift the delegated amounts. Totals stay constant.
  for (auto& [_, a] : accounts_) {
    for (const auto& grant : a.delegated_out) {
      a.cpu_capacity_us -= static_cast<std::int64_t>(grant.cpu_us);
      a.net_capacity_bytes -= static_cast<std::int64_t>(grant.net_bytes);
      Account* dst = find_mut(grant.to);
      if (dst) {
        dst->cpu_capacity_us += static_cast<std::int64_t>(grant.cpu_us);
        dst->net_capacity_bytes += static_cast<std::int64_t>(grant.net_bytes);
      }
    }
  }
}

}  // namespace rolechain
