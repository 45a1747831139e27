#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rolechain/access.hpp"
#include "rolechain/common.hpp"
#include "rolechain/context.hpp"

namespace rolechain {

/// Predicate vocabulary for separation-of-duty rule bodies.
///   right(S, p)  — subject S can exercise access right p
///   play(S, r)   — subject S holds role r (assignment or live delegation)
///   hold(r, q)   — role r owns right q (directly or via a junior role)
///   junior(X, Y) — registered fact: subject X ranks under subject Y
///   imply(p, q)  — registered fact: right p subsumes right q
enum class PredKind : std::uint8_t { Right, Play, Hold, Junior, Imply };

const char* pred_name(PredKind k);
std::optional<PredKind> parse_pred(std::string_view text);

/// A slot is either a constant or a variable (spelled with a '?' prefix).
struct Term {
  bool is_var = false;
  std::string text;

  bool operator==(const Term&) const = default;
  std::string to_string() const { return is_var ? "?" + text : text; }
};

struct Atom {
  PredKind pred = PredKind::Play;
  Term first;
  Term second;

  bool operator==(const Atom&) const = default;
  std::string to_string() const;
};

/// A forbidden conjunction: the rule is violated by any instantiation of its
/// variables that satisfies every atom.
struct SodRule {
  std::string rule_id;
  std::vector<Atom> atoms;

  std::string to_string() const;  // "play(?s, a); play(?s, b)"
};

struct MutualExclusionPair {
  std::string role_a;
  std::string role_b;
};

struct CardinalityRule {
  std::uint32_t max_roles_per_subject = 0;
};

enum class ViolationKind : std::uint8_t { Sod, Cardinality };

struct Violation {
  ViolationKind kind = ViolationKind::Sod;
  std::string rule_id;
  std::map<std::string, std::string> binding;  // variable -> chosen constant

  bool operator==(const Violation&) const = default;
  bool operator<(const Violation& other) const;
  std::string describe() const;
  ordered_json to_json() const;
};

struct CandidateAssignment {
  std::string subject;
  std::string role;
};

/// Registered rule set plus the fact relations rule bodies consult. Rules
/// are evaluated in registration order so "first violation" is stable.
class ConstraintSet {
 public:
  Status add_rule(SodRule rule);
  Status add_mutual_exclusion(const std::string& role_a, const std::string& role_b,
                              const PolicyStore& policy);
  void set_cardinality(std::uint32_t max_roles_per_subject);
  void add_junior_fact(const std::string& x, const std::string& y);
  void add_imply_fact(const std::string& p, const std::string& q);
  void remove_junior_fact(const std::string& x, const std::string& y);
  void remove_imply_fact(const std::string& p, const std::string& q);

  static SodRule compile_mutual_exclusion(const std::string& role_a,
                                          const std::string& role_b);
  static Result<SodRule> parse_rule(const std::string& rule_id,
                                    std::string_view body_text);

  /// Would inserting (subject, role) violate any rule or the cardinality
  /// bound? Evaluates every rule against state ∪ {candidate}; first hit wins.
  std::optional<Violation> check_assignment(const PolicyView& view,
                                            const std::string& subject,
                                            const std::string& role,
                                            SimMs at_ms) const;

  /// First satisfied rule body over the current state, if any.
  std::optional<Violation> first_violation(const PolicyView& view, SimMs at_ms) const;

  /// Every satisfied instantiation over the current state, sorted. Serial
  /// reference implementation for the sharded sweep in parallel.cpp.
  std::vector<Violation> scan_all(const PolicyView& view, SimMs at_ms) const;

  /// All satisfied instantiations of one rule. `candidate` overlays a
  /// tentative assignment; `fix_first` pins the rule's first variable
  /// (sharding hook). `first_only` stops at one hit.
  std::vector<Violation> satisfied_bindings(const PolicyView& view, const SodRule& rule,
                                            SimMs at_ms,
                                            const CandidateAssignment* candidate,
                                            const std::string* fix_first,
                                            bool first_only) const;

  std::vector<std::string> first_variable_domain(const PolicyView& view,
                                                 const SodRule& rule,
                                                 const CandidateAssignment* candidate) const;

  const std::vector<SodRule>& rules() const { return rules_; }
  const std::vector<MutualExclusionPair>& pairs() const { return pairs_; }
  const std::optional<CardinalityRule>& cardinality() const { return cardinality_; }
  const std::set<std::pair<std::string, std::string>>& junior_facts() const {
    return junior_facts_;
  }
  const std::set<std::pair<std::string, std::string>>& imply_facts() const {
    return imply_facts_;
  }

 private:
  std::vector<SodRule> rules_;  // includes compiled exclusion pairs, in order
  std::vector<MutualExclusionPair> pairs_;
  std::optional<CardinalityRule> cardinality_;
  std::set<std::pair<std::string, std::string>> junior_facts_;
  std::set<std::pair<std::string, std::string>> imply_facts_;
};

}  // namespace rolechain
