#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rolechain/common.hpp"
#include "rolechain/context.hpp"

namespace rolechain {

/// Permission modes: authorizations gate access, obligations are duties
/// attached to a decision. Negative modes forbid / waive respectively.
enum class Mode : std::uint8_t { AuthPlus, AuthMinus, ObligePlus, ObligeMinus };

inline bool is_authorization(Mode m) {
  return m == Mode::AuthPlus || m == Mode::AuthMinus;
}
inline bool is_positive(Mode m) {
  return m == Mode::AuthPlus || m == Mode::ObligePlus;
}
const char* mode_name(Mode m);  // "A+" "A-" "O+" "O-"
std::optional<Mode> parse_mode(std::string_view text);

/// The seven-field permission row: who (role) may/must (mode) do what
/// (action) to which object (target), under which context constraints,
/// with an optional exception condition that overrides a negative
/// authorization when active.
struct Permission {
  std::string identifier;
  Mode mode = Mode::AuthPlus;
  std::string role;
  std::string action;
  std::string target;
  std::vector<ContextCondition> constraints;
  std::optional<std::string> exception;

  bool operator==(const Permission&) const = default;
};

ordered_json permission_to_json(const Permission& p);
Result<Permission> permission_from_json(const ordered_json& j);

struct Subject {
  std::string id;  // opaque public-key identifier
  std::optional<std::string> display_name;
};

struct RoleAssignment {
  std::string subject_id;
  std::string role_name;
  std::string assigned_by;
  SimMs assigned_at_ms = 0;
};

/// Acyclic senior→junior role graph. A senior role inherits the permissions
/// of every role transitively junior to it.
class RoleHierarchy {
 public:
  Status add_edge(const std::string& senior, const std::string& junior);
  bool remove_edge(const std::string& senior, const std::string& junior);
  bool has_edge(const std::string& senior, const std::string& junior) const;
  /// True if `junior` is reachable from `senior` through one or more edges.
  bool reaches(const std::string& senior, const std::string& junior) const;

  /// The roots plus every role transitively junior to any of them.
  std::set<std::string> junior_closure(const std::set<std::string>& roots) const;
  /// Roles strictly senior to `role` (every role that reaches it).
  std::set<std::string> seniors_of(const std::string& role) const;

  const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }

 private:
  std::set<std::pair<std::string, std::string>> edges_;
  std::map<std::string, std::set<std::string>> direct_juniors_;
};

/// Relational policy state: registered roles, subject-role assignments,
/// permission rows, and the role hierarchy. Mutators here are unchecked
/// bookkeeping; issuer gating and constraint checks live in the engine.
class PolicyStore {
 public:
  // roles
  bool role_exists(const std::string& name) const { return roles_.count(name) > 0; }
  void register_role(const std::string& name) { roles_.insert(name); }
  const std::set<std::string>& roles() const { return roles_; }

  // subjects: the registry only grows, so "was ever assigned or party to a
  // delegation" stays answerable after revocations.
  void note_subject(const std::string& id);
  bool subject_known(const std::string& id) const { return subjects_.count(id) > 0; }
  const std::map<std::string, Subject>& subjects() const { return subjects_; }

  // assignments
  bool insert_assignment(RoleAssignment a);  // false on duplicate (subject, role)
  bool erase_assignment(const std::string& subject, const std::string& role);
  const RoleAssignment* find_assignment(const std::string& subject,
                                        const std::string& role) const;
  std::set<std::string> explicit_roles(const std::string& subject) const;
  std::size_t assignment_count(const std::string& subject) const;
  const std::map<std::string, std::map<std::string, RoleAssignment>>& assignments()
      const {
    return by_subject_;
  }

  // permissions
  bool insert_permission(Permission p);  // false on duplicate identifier
  bool erase_permission(const std::string& identifier);
  std::size_t erase_permissions_for_role(const std::string& role);
  const Permission* find_permission(const std::string& identifier) const;
  std::vector<const Permission*> permissions_for_role(const std::string& role) const;
  const std::map<std::string, Permission>& permissions() const { return permissions_; }

  RoleHierarchy& hierarchy() { return hierarchy_; }
  const RoleHierarchy& hierarchy() const { return hierarchy_; }

 private:
  std::set<std::string> roles_;
  std::map<std::string, Subject> subjects_;
  std::map<std::string, std::map<std::string, RoleAssignment>> by_subject_;
  std::map<std::string, Permission> permissions_;
  RoleHierarchy hierarchy_;
};

}  // namespace rolechain
