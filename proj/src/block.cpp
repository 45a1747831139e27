#include "rolechain/block.hpp"

namespace rolechain {

Digest compute_block_hash(const Block& b) {
  CanonicalWriter w;
  w.u64(b.height);
  w.str(b.producer);
  w.u64(b.timestamp_ms);
  w.raw(std::span<const std::uint8_t>(b.prev_hash.data(), b.prev_hash.size()));
  w.u64(b.tx_list.size());
  for (const Transaction& tx : b.tx_list) {
    w.str(tx.sender);
    w.u64(tx.submitted_at_ms);
    w.raw(canonical_payload_bytes(tx.kind, tx.payload));
    w.str(tx.signature);
  }
  return w.digest();
}

bool verify_blocks(std::span<const Block> blocks) {
  if (blocks.empty()) return false;
  const Digest zero{};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (compute_block_hash(b) != b.block_hash) return false;
    if (i == 0) {
      if (b.prev_hash != zero) return false;
    } else {
      if (b.prev_hash != blocks[i - 1].block_hash) return false;
    }
  }
  return true;
}

ordered_json block_to_json(const Block& b) {
  // Field order mirrors the hash input so a reader can re-hash line by line.
  ordered_json j;
  j["height"] = b.height;
  j["producer"] = b.producer;
  j["timestamp_ms"] = b.timestamp_ms;
  j["prev_hash"] = to_hex(b.prev_hash);
  ordered_json txs = ordered_json::array();
  for (const Transaction& tx : b.tx_list) txs.push_back(transaction_to_json(tx));
  j["tx_list"] = std::move(txs);
  j["block_hash"] = to_hex(b.block_hash);
  return j;
}

Result<Block> block_from_json(const ordered_json& j) {
  using R = Result<Block>;
  if (!j.is_object()) return R::fail(Errc::ParseError, "block must be an object");
  for (const char* key : {"height", "producer", "timestamp_ms", "prev_hash", "tx_list",
                          "block_hash"})
    if (!j.contains(key))
      return R::fail(Errc::ParseError, std::string("block missing field ") + key);
  Block b;
  b.height = j["height"].get<std::uint64_t>();
  b.producer = j["producer"].get<std::string>();
  b.timestamp_ms = j["timestamp_ms"].get<SimMs>();
  auto prev = digest_from_hex(j["prev_hash"].get<std::string>());
  if (!prev) return R::fail(Errc::ParseError, "bad prev_hash");
  b.prev_hash = *prev;
  for (const auto& jt : j["tx_list"]) {
    auto tx = transaction_from_json(jt);
    if (!tx.ok()) return R::fail(tx.status);
    b.tx_list.push_back(std::move(*tx.value));
  }
  auto hash = digest_from_hex(j["block_hash"].get<std::string>());
  if (!hash) return R::fail(Errc::ParseError, "bad block_hash");
  b.block_hash = *hash;
  return R::success(std::move(b));
}

}  // namespace rolechain
