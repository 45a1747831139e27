#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rolechain/engine.hpp"

namespace rolechain {

/// Result of feeding a JSON-lines transaction bundle into an engine.
/// Loading is fail-fast: the first line that cannot be parsed, submitted,
/// or applied stops the run and is reported by line number.
struct BundleOutcome {
  std::uint64_t applied = 0;              // transactions committed successfully
  std::optional<std::uint64_t> failed_line;
  Status error;

  bool ok() const { return error.ok(); }
  ordered_json to_json() const;
};

/// Each line holds one transaction object. Lines are lenient: a missing
/// submitted_at_ms defaults to the next block's slot time and a missing
/// signature is computed from the sender and payload. Every line is
/// committed in its own block before the next line is read.
BundleOutcome load_bundle(Engine& engine, const std::string& path);

}  // namespace rolechain
