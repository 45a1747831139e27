#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace rolechain {

/// Simulated wall clock, milliseconds since an arbitrary epoch.
using SimMs = std::uint64_t;

enum class Errc {
  Ok = 0,

  // accounts / chain
  UnknownAccount,
  DuplicateAccount,
  InvalidAccountName,
  BadSignature,
  InsufficientResources,
  RamDelegationForbidden,
  ClockRegression,
  BlockNotDue,

  // policy relations
  NotIssuer,
  UnknownRole,
  UnknownSubject,
  DuplicateAssignment,
  NoExistingAssignment,
  AmbiguousAssignment,
  SoDViolation,
  CardinalityExceeded,
  DuplicateIdentifier,
  UnknownIdentifier,
  NoPermissionsForRole,
  CycleDetected,

  // delegation lifecycle
  NotRoleHolder,
  ObligationNotDelegable,
  SingleStepExhausted,
  ExpiredParent,
  NotAuthorizedRevoker,
  UnknownDelegation,

  // rule registration
  DegenerateRule,

  // metrics / benchmarking
  EmptyWindow,
  DegenerateWindow,
  InvalidScenario,

  // io / cli / persistence
  ParseError,
  UsageError,
  IoError,
  ReplayMismatch,
};

const char* errc_name(Errc code);

/// Outcome of an operation where a domain violation is a value, not a fault.
struct Status {
  Errc code = Errc::Ok;
  std::string detail;

  bool ok() const { return code == Errc::Ok; }
  static Status success() { return {}; }
  static Status fail(Errc code, std::string detail = {}) {
    return {code, std::move(detail)};
  }
};

template <typename T>
struct Result {
  Status status;
  std::optional<T> value;

  bool ok() const { return status.ok() && value.has_value(); }
  static Result success(T v) {
    return {Status::success(), std::move(v)};
  }
  static Result fail(Errc code, std::string detail = {}) {
    return {Status::fail(code, std::move(detail)), std::nullopt};
  }
  static Result fail(Status s) { return {std::move(s), std::nullopt}; }
};

}  // namespace rolechain
