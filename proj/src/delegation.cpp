#include "rolechain/delegation.hpp"

#include <algorithm>
#include <set>

namespace rolechain {

const char* delegation_mode_name(DelegationMode m) {
  return m == DelegationMode::Grant ? "grant" : "transfer";
}

std::optional<DelegationMode> parse_delegation_mode(std::string_view text) {
  if (text == "grant") return DelegationMode::Grant;
  if (text == "transfer") return DelegationMode::Transfer;
  return std::nullopt;
}

ordered_json delegation_to_json(const Delegation& d) {
  ordered_json j;
  j["id"] = d.id;
  j["delegator"] = d.delegator;
  j["delegate"] = d.delegate;
  j["role"] = d.role;
  j["start_ms"] = d.start_ms ? ordered_json(*d.start_ms) : ordered_json(nullptr);
  j["expiry_ms"] = d.expiry_ms ? ordered_json(*d.expiry_ms) : ordered_json(nullptr);
  j["mode"] = delegation_mode_name(d.mode);
  j["multi_step_delegatable"] = d.multi_step_delegatable;
  j["levels_of_delegation"] = d.levels_of_delegation;
  j["remaining_levels"] = d.remaining_levels;
  j["parent_id"] = d.parent_id ? ordered_json(*d.parent_id) : ordered_json(nullptr);
  return j;
}

Result<Delegation> delegation_from_json(const ordered_json& j) {
  Delegation d;
  if (!j.is_object())
    return Result<Delegation>::fail(Errc::ParseError, "delegation must be an object");
  for (const char* key : {"id", "delegator", "delegate", "role", "mode"})
    if (!j.contains(key))
      return Result<Delegation>::fail(Errc::ParseError,
                                      std::string("delegation missing field ") + key);
  d.id = j["id"].get<std::uint64_t>();
  d.delegator = j["delegator"].get<std::string>();
  d.delegate = j["delegate"].get<std::string>();
  d.role = j["role"].get<std::string>();
  if (j.contains("start_ms") && !j["start_ms"].is_null())
    d.start_ms = j["start_ms"].get<SimMs>();
  if (j.contains("expiry_ms") && !j["expiry_ms"].is_null())
    d.expiry_ms = j["expiry_ms"].get<SimMs>();
  auto mode = parse_delegation_mode(j["mode"].get<std::string>());
  if (!mode) return Result<Delegation>::fail(Errc::ParseError, "bad delegation mode");
  d.mode = *mode;
  if (j.contains("multi_step_delegatable"))
    d.multi_step_delegatable = j["multi_step_delegatable"].get<bool>();
  if (j.contains("levels_of_delegation"))
    d.levels_of_delegation = j["levels_of_delegation"].get<std::uint32_t>();
  if (j.contains("remaining_levels"))
    d.remaining_levels = j["remaining_levels"].get<std::uint32_t>();
  if (j.contains("parent_id") && !j["parent_id"].is_null())
    d.parent_id = j["parent_id"].get<std::uint64_t>();
  return Result<Delegation>::success(std::move(d));
}

std::uint64_t DelegationStore::insert(Delegation d) {
  d.id = next_id_++;
  std::uint64_t id = d.id;
  by_id_.emplace(id, std::move(d));
  return id;
}

const Delegation* DelegationStore::find(std::uint64_t id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

bool DelegationStore::live(const Delegation& d, SimMs at_ms) const {
  if (d.start_ms && at_ms < *d.start_ms) return false;
  if (d.expiry_ms && at_ms >= *d.expiry_ms) return false;
  if (d.parent_id) {
    const Delegation* parent = find(*d.parent_id);
    // A re-delegation dies with its parent; ids grow monotonically along a
    // chain so the recursion terminates.
    if (!parent || !live(*parent, at_ms)) return false;
  }
  return true;
}

std::vector<const Delegation*> DelegationStore::live_to(const std::string& delegate,
                                                        SimMs at_ms) const {
  std::vector<const Delegation*> out;
  for (const auto& [_, d] : by_id_)
    if (d.delegate == delegate && live(d, at_ms)) out.push_back(&d);
  return out;
}

std::vector<const Delegation*> DelegationStore::live_by(const std::string& delegator,
                                                        SimMs at_ms) const {
  std::vector<const Delegation*> out;
  for (const auto& [_, d] : by_id_)
    if (d.delegator == delegator && live(d, at_ms)) out.push_back(&d);
  return out;
}

void DelegationStore::collect_tree(std::uint64_t id,
                                   std::vector<std::uint64_t>& out) const {
  out.push_back(id);
  for (const auto& [child_id, d] : by_id_)
    if (d.parent_id && *d.parent_id == id) collect_tree(child_id, out);
}

std::vector<Delegation> DelegationStore::remove_tree(std::uint64_t id) {
  std::vector<Delegation> removed;
  if (!by_id_.count(id)) return removed;
  std::vector<std::uint64_t> ids;
  collect_tree(id, ids);
  for (std::uint64_t victim : ids) {
    auto it = by_id_.find(victim);
    if (it != by_id_.end()) {
      removed.push_back(it->second);
      by_id_.erase(it);
    }
  }
  return removed;
}

std::vector<Delegation> DelegationStore::expire_due(SimMs now_ms) {
  std::vector<Delegation> removed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = by_id_.begin(); it != by_id_.end(); ++it) {
      const Delegation& d = it->second;
      bool expired = d.expiry_ms && now_ms >= *d.expiry_ms;
      bool orphaned = d.parent_id && !by_id_.count(*d.parent_id);
      if (expired || orphaned) {
        removed.push_back(d);
        by_id_.erase(it);
        changed = true;
        break;
      }
    }
  }
  std::sort(removed.begin(), removed.end(),
            [](const Delegation& a, const Delegation& b) { return a.id < b.id; });
  return removed;
}

std::vector<Delegation> DelegationStore::remove_by_delegator_for_roles(
    const std::string& delegator, const std::set<std::string>& roles) {
  std::vector<Delegation> removed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [id, d] : by_id_) {
      if (d.delegator == delegator && roles.count(d.role)) {
        auto tree = remove_tree(id);
        removed.insert(removed.end(), tree.begin(), tree.end());
        changed = true;
        break;
      }
    }
  }
  std::sort(removed.begin(), removed.end(),
            [](const Delegation& a, const Delegation& b) { return a.id < b.id; });
  return removed;
}

}  // namespace rolechain
