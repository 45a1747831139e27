#include "rolechain/constraints.hpp"

#include <algorithm>
#include <functional>

namespace rolechain {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

Term make_term(std::string_view text) {
  Term t;
  if (!text.empty() && text.front() == '?') {
    t.is_var = true;
    t.text = std::string(text.substr(1));
  } else {
    t.text = std::string(text);
  }
  return t;
}

/// Slot kinds drive variable domains: subjects, roles, or right identifiers.
enum class SlotKind { Subject, Role, Right };

SlotKind first_slot_kind(PredKind p) {
  switch (p) {
    case PredKind::Right: return SlotKind::Subject;
    case PredKind::Play: return SlotKind::Subject;
    case PredKind::Hold: return SlotKind::Role;
    case PredKind::Junior: return SlotKind::Subject;
    case PredKind::Imply: return SlotKind::Right;
  }
  return SlotKind::Subject;
}

SlotKind second_slot_kind(PredKind p) {
  switch (p) {
    case PredKind::Right: return SlotKind::Right;
    case PredKind::Play: return SlotKind::Role;
    case PredKind::Hold: return SlotKind::Right;
    case PredKind::Junior: return SlotKind::Subject;
    case PredKind::Imply: return SlotKind::Right;
  }
  return SlotKind::Role;
}

}  // namespace

const char* pred_name(PredKind k) {
  switch (k) {
    case PredKind::Right: return "right";
    case PredKind::Play: return "play";
    case PredKind::Hold: return "hold";
    case PredKind::Junior: return "junior";
    case PredKind::Imply: return "imply";
  }
  return "play";
}

std::optional<PredKind> parse_pred(std::string_view text) {
  if (text == "right") return PredKind::Right;
  if (text == "play") return PredKind::Play;
  if (text == "hold") return PredKind::Hold;
  if (text == "junior") return PredKind::Junior;
  if (text == "imply") return PredKind::Imply;
  return std::nullopt;
}

std::string Atom::to_string() const {
  return std::string(pred_name(pred)) + "(" + first.to_string() + ", " +
         second.to_string() + ")";
}

std::string SodRule::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += "; ";
    out += atoms[i].to_string();
  }
  return out;
}

bool Violation::operator<(const Violation& other) const {
  if (rule_id != other.rule_id) return rule_id < other.rule_id;
  if (kind != other.kind) return kind < other.kind;
  return binding < other.binding;
}

std::string Violation::describe() const {
  std::string out = rule_id + " {";
  bool first = true;
  for (const auto& [var, val] : binding) {
    if (!first) out += ", ";
    first = false;
    out += "?" + var + "=" + val;
  }
  out += "}";
  return out;
}

ordered_json Violation::to_json() const {
  ordered_json j;
  j["kind"] = kind == ViolationKind::Sod ? "sod" : "cardinality";
  j["rule_id"] = rule_id;
  ordered_json b = ordered_json::object();
  for (const auto& [var, val] : binding) b[var] = val;
  j["binding"] = std::move(b);
  return j;
}

Status ConstraintSet::add_rule(SodRule rule) {
  if (rule.atoms.empty())
    return Status::fail(Errc::DegenerateRule, "rule with no atoms is always violated");
  for (const auto& existing : rules_)
    if (existing.rule_id == rule.rule_id)
      return Status::fail(Errc::DuplicateIdentifier, "rule id " + rule.rule_id);
  rules_.push_back(std::move(rule));
  return Status::success();
}

Status ConstraintSet::add_mutual_exclusion(const std::string& role_a,
                                           const std::string& role_b,
                                           const PolicyStore& policy) {
  if (role_a == role_b)
    return Status::fail(Errc::DegenerateRule,
                        "pair (" + role_a + ", " + role_b + ") names one role twice");
  if (!policy.role_exists(role_a))
    return Status::fail(Errc::UnknownRole, role_a);
  if (!policy.role_exists(role_b))
    return Status::fail(Errc::UnknownRole, role_b);
  Status s = add_rule(compile_mutual_exclusion(role_a, role_b));
  if (!s.ok()) return s;
  pairs_.push_back({role_a, role_b});
  return Status::success();
}

void ConstraintSet::set_cardinality(std::uint32_t max_roles_per_subject) {
  cardinality_ = CardinalityRule{max_roles_per_subject};
}

void ConstraintSet::add_junior_fact(const std::string& x, const std::string& y) {
  junior_facts_.emplace(x, y);
}

void ConstraintSet::add_imply_fact(const std::string& p, const std::string& q) {
  imply_facts_.emplace(p, q);
}

void ConstraintSet::remove_junior_fact(const std::string& x, const std::string& y) {
  junior_facts_.erase({x, y});
}

void ConstraintSet::remove_imply_fact(const std::string& p, const std::string& q) {
  imply_facts_.erase({p, q});
}

SodRule ConstraintSet::compile_mutual_exclusion(const std::string& role_a,
                                                const std::string& role_b) {
  SodRule rule;
  rule.rule_id = "pair:" + role_a + "|" + role_b;
  Atom a;
  a.pred = PredKind::Play;
  a.first = Term{true, "S"};
  a.second = Term{false, role_a};
  Atom b = a;
  b.second = Term{false, role_b};
  rule.atoms = {a, b};
  return rule;
}

Result<SodRule> ConstraintSet::parse_rule(const std::string& rule_id,
                                          std::string_view body_text) {
  SodRule rule;
  rule.rule_id = rule_id;
  std::size_t pos = 0;
  while (pos < body_text.size()) {
    std::size_t end = body_text.find(';', pos);
    std::string_view piece = body_text.substr(
        pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? body_text.size() : end + 1;
    piece = trim(piece);
    if (piece.empty()) continue;

    std::size_t open = piece.find('(');
    std::size_t close = piece.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos ||
        close < open)
      return Result<SodRule>::fail(Errc::ParseError,
                                   "atom must look like pred(a, b)");
    auto pred = parse_pred(trim(piece.substr(0, open)));
    if (!pred) return Result<SodRule>::fail(Errc::ParseError, "unknown predicate");
    std::string_view args = piece.substr(open + 1, close - open - 1);
    std::size_t comma = args.find(',');
    if (comma == std::string_view::npos)
      return Result<SodRule>::fail(Errc::ParseError, "atom needs two arguments");
    Atom atom;
    atom.pred = *pred;
    atom.first = make_term(trim(args.substr(0, comma)));
    atom.second = make_term(trim(args.substr(comma + 1)));
    if (atom.first.text.empty() || atom.second.text.empty())
      return Result<SodRule>::fail(Errc::ParseError, "empty atom argument");
    rule.atoms.push_back(std::move(atom));
  }
  if (rule.atoms.empty())
    return Result<SodRule>::fail(Errc::ParseError, "rule body has no atoms");
  return Result<SodRule>::success(std::move(rule));
}

namespace {

/// Enumerates variable bindings for one rule and reports the satisfying ones.
class RuleEvaluator {
 public:
  RuleEvaluator(const ConstraintSet& set, const PolicyView& view, const SodRule& rule,
                SimMs at_ms, const CandidateAssignment* candidate)
      : set_(set), view_(view), rule_(rule), at_ms_(at_ms), candidate_(candidate) {
    collect_variables();
  }

  const std::vector<std::string>& variables() const { return var_names_; }

  std::vector<std::string> domain_of(std::size_t var_index) const {
    bool subject = false, role = false, right = false;
    for (const auto& atom : rule_.atoms) {
      if (atom.first.is_var && atom.first.text == var_names_[var_index])
        note_kind(first_slot_kind(atom.pred), subject, role, right);
      if (atom.second.is_var && atom.second.text == var_names_[var_index])
        note_kind(second_slot_kind(atom.pred), subject, role, right);
    }
    std::vector<std::set<std::string>> pools;
    if (subject) pools.push_back(subject_domain());
    if (role) pools.push_back(role_domain());
    if (right) pools.push_back(right_domain());
    if (pools.empty()) return {};
    std::set<std::string> acc = pools[0];
    for (std::size_t i = 1; i < pools.size(); ++i) {
      std::set<std::string> next;
      for (const auto& v : acc)
        if (pools[i].count(v)) next.insert(v);
      acc = std::move(next);
    }
    return {acc.begin(), acc.end()};
  }

  /// Depth-first search over variable values with eager atom pruning.
  void enumerate(const std::string* fix_first, bool first_only,
                 std::vector<Violation>& out) const {
    std::map<std::string, std::string> binding;
    if (!var_names_.empty() && fix_first) binding[var_names_[0]] = *fix_first;
    search(0, binding, first_only, out);
  }

 private:
  static void note_kind(SlotKind k, bool& subject, bool& role, bool& right) {
    if (k == SlotKind::Subject) subject = true;
    if (k == SlotKind::Role) role = true;
    if (k == SlotKind::Right) right = true;
  }

  void collect_variables() {
    for (const auto& atom : rule_.atoms) {
      for (const Term* t : {&atom.first, &atom.second}) {
        if (t->is_var &&
            std::find(var_names_.begin(), var_names_.end(), t->text) ==
                var_names_.end())
          var_names_.push_back(t->text);
      }
    }
  }

  std::set<std::string> subject_domain() const {
    std::set<std::string> out;
    for (const auto& [id, _] : view_.policy().subjects()) out.insert(id);
    for (const auto& [_, d] : view_.delegations().all()) {
      out.insert(d.delegator);
      out.insert(d.delegate);
    }
    for (const auto& [x, y] : set_.junior_facts()) {
      out.insert(x);
      out.insert(y);
    }
    if (candidate_) out.insert(candidate_->subject);
    return out;
  }

  std::set<std::string> role_domain() const {
    std::set<std::string> out = view_.policy().roles();
    if (candidate_) out.insert(candidate_->role);
    return out;
  }

  std::set<std::string> right_domain() const {
    std::set<std::string> out;
    for (const auto& [id, _] : view_.policy().permissions()) out.insert(id);
    for (const auto& [p, q] : set_.imply_facts()) {
      out.insert(p);
      out.insert(q);
    }
    return out;
  }

  bool term_value(const Term& t, const std::map<std::string, std::string>& binding,
                  std::string& out) const {
    if (!t.is_var) {
      out = t.text;
      return true;
    }
    auto it = binding.find(t.text);
    if (it == binding.end()) return false;
    out = it->second;
    return true;
  }

  bool plays(const std::string& subject, const std::string& role) const {
    if (candidate_ && candidate_->subject == subject && candidate_->role == role)
      return true;
    return view_.play_roles(subject, at_ms_).count(role) > 0;
  }

  bool atom_true(const Atom& atom, const std::string& a, const std::string& b) const {
    switch (atom.pred) {
      case PredKind::Play:
        return plays(a, b);
      case PredKind::Right: {
        const Permission* p = view_.policy().find_permission(b);
        if (!p) return false;
        std::set<std::string> played = view_.play_roles(a, at_ms_);
        if (candidate_ && candidate_->subject == a) played.insert(candidate_->role);
        return view_.policy().hierarchy().junior_closure(played).count(p->role) > 0;
      }
      case PredKind::Hold: {
        const Permission* p = view_.policy().find_permission(b);
        if (!p) return false;
        return view_.policy().hierarchy().junior_closure({a}).count(p->role) > 0;
      }
      case PredKind::Junior:
        return set_.junior_facts().count({a, b}) > 0;
      case PredKind::Imply:
        return set_.imply_facts().count({a, b}) > 0;
    }
    return false;
  }

  /// Atoms whose terms are fully bound must hold before deeper variables are
  /// tried; that prunes most of the cross product.
  bool bound_atoms_hold(const std::map<std::string, std::string>& binding) const {
    for (const auto& atom : rule_.atoms) {
      std::string a, b;
      if (!term_value(atom.first, binding, a)) continue;
      if (!term_value(atom.second, binding, b)) continue;
      if (!atom_true(atom, a, b)) return false;
    }
    return true;
  }

  void search(std::size_t var_index, std::map<std::string, std::string>& binding,
              bool first_only, std::vector<Violation>& out) const {
    if (!bound_atoms_hold(binding)) return;
    if (first_only && !out.empty()) return;
    // Skip variables already pinned by the caller.
    while (var_index < var_names_.size() && binding.count(var_names_[var_index]))
      ++var_index;
    if (var_index >= var_names_.size()) {
      Violation v;
      v.kind = ViolationKind::Sod;
      v.rule_id = rule_.rule_id;
      v.binding = binding;
      out.push_back(std::move(v));
      return;
    }
    for (const auto& value : domain_of(var_index)) {
      binding[var_names_[var_index]] = value;
      search(var_index + 1, binding, first_only, out);
      binding.erase(var_names_[var_index]);
      if (first_only && !out.empty()) return;
    }
  }

  const ConstraintSet& set_;
  const PolicyView& view_;
  const SodRule& rule_;
  SimMs at_ms_;
  const CandidateAssignment* candidate_;
  std::vector<std::string> var_names_;
};

}  // namespace

std::vector<Violation> ConstraintSet::satisfied_bindings(
    const PolicyView& view, const SodRule& rule, SimMs at_ms,
    const CandidateAssignment* candidate, const std::string* fix_first,
    bool first_only) const {
  RuleEvaluator eval(*this, view, rule, at_ms, candidate);
  std::vector<Violation> out;
  eval.enumerate(fix_first, first_only, out);
  return out;
}

std::vector<std::string> ConstraintSet::first_variable_domain(
    const PolicyView& view, const SodRule& rule,
    const CandidateAssignment* candidate) const {
  RuleEvaluator eval(*this, view, rule, /*at_ms=*/0, candidate);  // domains are time-free
  if (eval.variables().empty()) return {};
  return eval.domain_of(0);
}

std::optional<Violation> ConstraintSet::check_assignment(const PolicyView& view,
                                                         const std::string& subject,
                                                         const std::string& role,
                                                         SimMs at_ms) const {
  CandidateAssignment candidate{subject, role};
  for (const auto& rule : rules_) {
    auto hits = satisfied_bindings(view, rule, at_ms, &candidate, nullptr, true);
    if (!hits.empty()) return hits.front();
  }
  if (cardinality_) {
    std::size_t count = view.policy().assignment_count(subject);
    if (!view.policy().find_assignment(subject, role)) ++count;
    if (count > cardinality_->max_roles_per_subject) {
      Violation v;
      v.kind = ViolationKind::Cardinality;
      v.rule_id = "cardinality";
      v.binding = {{"S", subject}};
      return v;
    }
  }
  return std::nullopt;
}

std::optional<Violation> ConstraintSet::first_violation(const PolicyView& view,
                                                        SimMs at_ms) const {
  for (const auto& rule : rules_) {
    auto hits = satisfied_bindings(view, rule, at_ms, nullptr, nullptr, true);
    if (!hits.empty()) return hits.front();
  }
  return std::nullopt;
}

std::vector<Violation> ConstraintSet::scan_all(const PolicyView& view,
                                               SimMs at_ms) const {
  std::vector<Violation> out;
  for (const auto& rule : rules_) {
    auto hits = satisfied_bindings(view, rule, at_ms, nullptr, nullptr, false);
    out.insert(out.end(), hits.begin(), hits.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rolechain
