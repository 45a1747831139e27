#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/context.hpp"

namespace rolechain {

/// Grant shares the role with the delegate; Transfer additionally suspends
/// the delegator's own use of it while the delegation is live.
enum class DelegationMode : std::uint8_t { Grant, Transfer };

const char* delegation_mode_name(DelegationMode m);  // "grant" / "transfer"
std::optional<DelegationMode> parse_delegation_mode(std::string_view text);

/// One delegated role holding. Re-delegations reference their parent; the
/// level budget is fixed along a chain and `remaining_levels` strictly
/// decreases hop by hop.
struct Delegation {
  std::uint64_t id = 0;
  std::string delegator;
  std::string delegate;
  std::string role;
  std::optional<SimMs> start_ms;   // inactive until this time when set
  std::optional<SimMs> expiry_ms;  // dead from this time on when set
  DelegationMode mode = DelegationMode::Grant;
  bool multi_step_delegatable = false;
  std::uint32_t levels_of_delegation = 1;
  std::uint32_t remaining_levels = 1;
  std::optional<std::uint64_t> parent_id;
};

ordered_json delegation_to_json(const Delegation& d);
Result<Delegation> delegation_from_json(const ordered_json& j);

class DelegationStore {
 public:
  std::uint64_t insert(Delegation d);  // assigns the next id, returns it
  const Delegation* find(std::uint64_t id) const;
  const std::map<std::uint64_t, Delegation>& all() const { return by_id_; }

  /// Active at `at_ms`: started, not expired, and every ancestor live too.
  bool live(const Delegation& d, SimMs at_ms) const;

  std::vector<const Delegation*> live_to(const std::string& delegate, SimMs at_ms) const;
  std::vector<const Delegation*> live_by(const std::string& delegator, SimMs at_ms) const;

  /// Removes the record and every transitive re-delegation under it.
  /// Returns the removed records (tree order, root first).
  std::vector<Delegation> remove_tree(std::uint64_t id);

  /// Removes every delegation whose expiry has arrived, then re-delegations
  /// orphaned by those removals. Returns removed records sorted by id.
  std::vector<Delegation> expire_due(SimMs now_ms);

  /// Removes every delegation made by `delegator` for any of `roles`,
  /// with descendants. Returns removed records sorted by id.
  std::vector<Delegation> remove_by_delegator_for_roles(
      const std::string& delegator, const std::set<std::string>& roles);

 private:
  void collect_tree(std::uint64_t id, std::vector<std::uint64_t>& out) const;

  std::map<std::uint64_t, Delegation> by_id_;
  std::uint64_t next_id_ = 1;
};

}  // namespace rolechain
