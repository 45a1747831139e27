#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rolechain {

using Digest = std::array<std::uint8_t, 32>;

/// SHA3-256 over a byte buffer.
Digest sha3_256(std::span<const std::uint8_t> bytes);
Digest sha3_256(std::string_view text);

std::string to_hex(const Digest& digest);
std::optional<Digest> digest_from_hex(std::string_view hex);

/// Deterministic, length-prefixed binary encoding used for every hashed or
/// signed structure. Integers are fixed-width little-endian; strings and
/// nested buffers carry a u64 byte count, so no two distinct field sequences
/// share an encoding.
class CanonicalWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void str(std::string_view s);
  void raw(std::span<const std::uint8_t> bytes);
  void opt_u64(const std::optional<std::uint64_t>& v);
  void opt_str(const std::optional<std::string>& v);

  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  Digest digest() const { return sha3_256(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

}  // namespace rolechain
