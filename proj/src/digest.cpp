#include "rolechain/digest.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace rolechain {

Digest sha3_256(std::span<const std::uint8_t> bytes) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha3_256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("sha3-256 digest failed");
  }
  return out;
}

Digest sha3_256(std::string_view text) {
  return sha3_256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(const Digest& digest) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (std::uint8_t b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

std::optional<Digest> digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  Digest out{};
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void CanonicalWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void CanonicalWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void CanonicalWriter::str(std::string_view s) {
  u64(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void CanonicalWriter::raw(std::span<const std::uint8_t> bytes) {
  u64(bytes.size());
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void CanonicalWriter::opt_u64(const std::optional<std::uint64_t>& v) {
  u8(v.has_value() ? 1 : 0);
  if (v) u64(*v);
}

void CanonicalWriter::opt_str(const std::optional<std::string>& v) {
  u8(v.has_value() ? 1 : 0);
  if (v) str(*v);
}

}  // namespace rolechain
