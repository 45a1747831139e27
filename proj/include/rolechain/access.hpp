#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/context.hpp"
#include "rolechain/delegation.hpp"
#include "rolechain/policy.hpp"

namespace rolechain {

struct AccessRequest {
  std::string subject_id;
  std::string operation;
  std::string object;
  SimMs at_ms = 0;  // evaluation time for delegation liveness
  RequestContext context;
};

enum class DecisionReason : std::uint8_t {
  AllowedPositive,      // a surviving A+ row matched
  AllowedException,     // an A- row's exception condition is active
  DeniedNegative,       // a surviving A- row without an active exception
  DeniedNoMatch,        // nothing applicable: default deny
  DeniedUnknownSubject  // subject never assigned or delegated anything
};

const char* reason_name(DecisionReason r);

struct Decision {
  bool allowed = false;
  std::optional<std::string> matched_permission;
  std::vector<std::string> obligations;  // applicable O+/O- row identifiers
  DecisionReason reason = DecisionReason::DeniedNoMatch;
  std::optional<std::uint64_t> audit_ref;

  bool operator==(const Decision&) const = default;
};

ordered_json decision_to_json(const Decision& d);

/// Read-only façade over the policy and delegation stores; every query is
/// pure, so batches of them may be evaluated concurrently.
class PolicyView {
 public:
  PolicyView(const PolicyStore& policy, const DelegationStore& delegations)
      : policy_(policy), delegations_(delegations) {}

  /// Roles the subject holds directly: explicit assignments plus live
  /// delegations to it. No hierarchy closure, no transfer suspension —
  /// this is the relation separation-of-duty rules range over.
  std::set<std::string> play_roles(const std::string& subject, SimMs at_ms) const;

  /// Roles whose permissions the subject can exercise: junior closure of
  /// play_roles, minus roles the subject has transfer-delegated away.
  std::set<std::string> effective_roles(const std::string& subject, SimMs at_ms) const;

  /// Deny-overrides combining with default deny; see module tests for the
  /// full decision table.
  Decision decide(const AccessRequest& request) const;

  bool subject_known(const std::string& subject) const;

  const PolicyStore& policy() const { return policy_; }
  const DelegationStore& delegations() const { return delegations_; }

 private:
  const PolicyStore& policy_;
  const DelegationStore& delegations_;
};

}  // namespace rolechain
