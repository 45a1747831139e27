#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rolechain/digest.hpp"
#include "rolechain/transaction.hpp"

namespace rolechain {

struct Block {
  std::uint64_t height = 0;
  std::string producer;
  SimMs timestamp_ms = 0;
  Digest prev_hash{};  // all zeros for the genesis block
  std::vector<Transaction> tx_list;
  Digest block_hash{};
};

/// Digest over (height, producer, timestamp, prev_hash, canonical tx list).
Digest compute_block_hash(const Block& b);

/// True iff every hash recomputes, every prev_hash links to its predecessor,
/// and the first block's prev_hash is all zeros.
bool verify_blocks(std::span<const Block> blocks);

ordered_json block_to_json(const Block& b);
Result<Block> block_from_json(const ordered_json& j);

}  // namespace rolechain
