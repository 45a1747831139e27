#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rolechain/common.hpp"
#include "rolechain/transaction.hpp"

namespace rolechain {

struct KindCost {
  std::uint64_t cpu_us = 0;
  std::uint64_t net_bytes = 0;
};

/// Per-kind resource prices charged at submission, plus the RAM footprint of
/// a stored permission row. Defaults carry the measured cost table; any entry
/// can be overridden from a key-value config file.
struct ResourceTariff {
  std::array<KindCost, kTxKindCount> by_kind{};
  std::uint64_t ram_bytes_per_permission_row = 128;

  const KindCost& cost_of(TxKind kind) const {
    return by_kind[static_cast<std::size_t>(kind)];
  }

  static ResourceTariff defaults();
};

/// File format: one `key = value` per line, `#` comments. Keys are
/// `<kind>.cpu_us`, `<kind>.net_bytes`, and `ram.bytes_per_permission_row`.
/// Unknown keys fail the load.
Result<ResourceTariff> load_tariff_file(const std::string& path);
Result<ResourceTariff> parse_tariff(const std::string& text);

}  // namespace rolechain
