#include "rolechain/policy.hpp"

#include <deque>

namespace rolechain {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::AuthPlus: return "A+";
    case Mode::AuthMinus: return "A-";
    case Mode::ObligePlus: return "O+";
    case Mode::ObligeMinus: return "O-";
  }
  return "A+";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "A+" || text == "a+") return Mode::AuthPlus;
  if (text == "A-" || text == "a-") return Mode::AuthMinus;
  if (text == "O+" || text == "o+") return Mode::ObligePlus;
  if (text == "O-" || text == "o-") return Mode::ObligeMinus;
  return std::nullopt;
}

ordered_json permission_to_json(const Permission& p) {
  ordered_json j;
  j["identifier"] = p.identifier;
  j["mode"] = mode_name(p.mode);
  j["role"] = p.role;
  j["action"] = p.action;
  j["target"] = p.target;
  ordered_json cs = ordered_json::array();
  for (const auto& c : p.constraints) cs.push_back(condition_to_json(c));
  j["constraints"] = std::move(cs);
  j["exception"] = p.exception ? ordered_json(*p.exception) : ordered_json(nullptr);
  return j;
}

Result<Permission> permission_from_json(const ordered_json& j) {
  Permission p;
  if (!j.is_object())
    return Result<Permission>::fail(Errc::ParseError, "permission must be an object");
  for (const char* key : {"identifier", "mode", "role", "action", "target"})
    if (!j.contains(key))
      return Result<Permission>::fail(Errc::ParseError,
                                      std::string("permission missing field ") + key);
  p.identifier = j["identifier"].get<std::string>();
  auto mode = parse_mode(j["mode"].get<std::string>());
  if (!mode) return Result<Permission>::fail(Errc::ParseError, "bad mode");
  p.mode = *mode;
  p.role = j["role"].get<std::string>();
  p.action = j["action"].get<std::string>();
  p.target = j["target"].get<std::string>();
  if (j.contains("constraints")) {
    for (const auto& jc : j["constraints"]) {
      auto c = condition_from_json(jc);
      if (!c.ok()) return Result<Permission>::fail(c.status);
      p.constraints.push_back(*c.value);
    }
  }
  if (j.contains("exception") && !j["exception"].is_null())
    p.exception = j["exception"].get<std::string>();
  return Result<Permission>::success(std::move(p));
}

Status RoleHierarchy::add_edge(const std::string& senior, const std::string& junior) {
  if (senior == junior)
    return Status::fail(Errc::CycleDetected, "self edge " + senior);
  // Inserting senior→junior closes a cycle iff junior already reaches senior.
  if (reaches(junior, senior))
    return Status::fail(Errc::CycleDetected,
                        "edge " + senior + "->" + junior + " closes a cycle");
  edges_.emplace(senior, junior);
  direct_juniors_[senior].insert(junior);
  return Status::success();
}

bool RoleHierarchy::remove_edge(const std::string& senior, const std::string& junior) {
  if (!edges_.erase({senior, junior})) return false;
  auto it = direct_juniors_.find(senior);
  if (it != direct_juniors_.end()) {
    it->second.erase(junior);
    if (it->second.empty()) direct_juniors_.erase(it);
  }
  return true;
}

bool RoleHierarchy::has_edge(const std::string& senior, const std::string& junior) const {
  return edges_.count({senior, junior}) > 0;
}

bool RoleHierarchy::reaches(const std::string& senior, const std::string& junior) const {
  auto closure = junior_closure({senior});
  return senior != junior && closure.count(junior) > 0;
}

std::set<std::string> RoleHierarchy::junior_closure(
    const std::set<std::string>& roots) const {
  std::set<std::string> seen = roots;
  std::deque<std::string> frontier(roots.begin(), roots.end());
  while (!frontier.empty()) {
    std::string role = frontier.front();
    frontier.pop_front();
    auto it = direct_juniors_.find(role);
    if (it == direct_juniors_.end()) continue;
    for (const auto& junior : it->second)
      if (seen.insert(junior).second) frontier.push_back(junior);
  }
  return seen;
}

std::set<std::string> RoleHierarchy::seniors_of(const std::string& role) const {
  std::set<std::string> out;
  // Small graphs: fixpoint over the edge list.
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [senior, junior] : edges_) {
      if (junior == role || out.count(junior)) {
        if (senior != role && out.insert(senior).second) grew = true;
      }
    }
  }
  return out;
}

void PolicyStore::note_subject(const std::string& id) {
  subjects_.emplace(id, Subject{id, std::nullopt});
}

bool PolicyStore::insert_assignment(RoleAssignment a) {
  note_subject(a.subject_id);
  auto& roles = by_subject_[a.subject_id];
  return roles.emplace(a.role_name, std::move(a)).second;
}

bool PolicyStore::erase_assignment(const std::string& subject, const std::string& role) {
  auto it = by_subject_.find(subject);
  if (it == by_subject_.end()) return false;
  if (!it->second.erase(role)) return false;
  if (it->second.empty()) by_subject_.erase(it);
  return true;
}

const RoleAssignment* PolicyStore::find_assignment(const std::string& subject,
                                                   const std::string& role) const {
  auto it = by_subject_.find(subject);
  if (it == by_subject_.end()) return nullptr;
  auto jt = it->second.find(role);
  return jt == it->second.end() ? nullptr : &jt->second;
}

std::set<std::string> PolicyStore::explicit_roles(const std::string& subject) const {
  std::set<std::string> out;
  auto it = by_subject_.find(subject);
  if (it == by_subject_.end()) return out;
  for (const auto& [role, _] : it->second) out.insert(role);
  return out;
}

std::size_t PolicyStore::assignment_count(const std::string& subject) const {
  auto it = by_subject_.find(subject);
  return it == by_subject_.end() ? 0 : it->second.size();
}

bool PolicyStore::insert_permission(Permission p) {
  auto id = p.identifier;
  return permissions_.emplace(std::move(id), std::move(p)).second;
}

bool PolicyStore::erase_permission(const std::string& identifier) {
  return permissions_.erase(identifier) > 0;
}

std::size_t PolicyStore::erase_permissions_for_role(const std::string& role) {
  std::size_t removed = 0;
  for (auto it = permissions_.begin(); it != permissions_.end();) {
    if (it->second.role == role) {
      it = permissions_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

const Permission* PolicyStore::find_permission(const std::string& identifier) const {
  auto it = permissions_.find(identifier);
  return it == permissions_.end() ? nullptr : &it->second;
}

std::vector<const Permission*> PolicyStore::permissions_for_role(
    const std::string& role) const {
  std::vector<const Permission*> out;
  for (const auto& [_, p] : permissions_)
    if (p.role == role) out.push_back(&p);
  return out;
}

}  // namespace rolechain
