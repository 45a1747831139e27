#include "rolechain/access.hpp"

namespace rolechain {

const char* reason_name(DecisionReason r) {
  switch (r) {
    case DecisionReason::AllowedPositive: return "allowed_positive";
    case DecisionReason::AllowedException: return "allowed_exception";
    case DecisionReason::DeniedNegative: return "denied_negative";
    case DecisionReason::DeniedNoMatch: return "denied_no_match";
    case DecisionReason::DeniedUnknownSubject: return "denied_unknown_subject";
  }
  return "denied_no_match";
}

ordered_json decision_to_json(const Decision& d) {
  ordered_json j;
  j["allowed"] = d.allowed;
  j["matched_permission"] =
      d.matched_permission ? ordered_json(*d.matched_permission) : ordered_json(nullptr);
  ordered_json obl = ordered_json::array();
  for (const auto& o : d.obligations) obl.push_back(o);
  j["obligations"] = std::move(obl);
  j["reason"] = reason_name(d.reason);
  j["audit_ref"] = d.audit_ref ? ordered_json(*d.audit_ref) : ordered_json(nullptr);
  return j;
}

std::set<std::string> PolicyView::play_roles(const std::string& subject,
                                             SimMs at_ms) const {
  std::set<std::string> roles = policy_.explicit_roles(subject);
  for (const Delegation* d : delegations_.live_to(subject, at_ms))
    roles.insert(d->role);
  return roles;
}

std::set<std::string> PolicyView::effective_roles(const std::string& subject,
                                                  SimMs at_ms) const {
  std::set<std::string> base = play_roles(subject, at_ms);
  std::set<std::string> effective = policy_.hierarchy().junior_closure(base);
  // A live transfer-mode delegation suspends the delegator's own use of the
  // delegated role; the assignment row itself stays in place.
  for (const Delegation* d : delegations_.live_by(subject, at_ms))
    if (d->mode == DelegationMode::Transfer) effective.erase(d->role);
  return effective;
}

bool PolicyView::subject_known(const std::string& subject) const {
  if (policy_.subject_known(subject)) return true;
  for (const auto& [_, d] : delegations_.all())
    if (d.delegate == subject || d.delegator == subject) return true;
  return false;
}

Decision PolicyView::decide(const AccessRequest& request) const {
  Decision decision;
  if (!subject_known(request.subject_id)) {
    decision.reason = DecisionReason::DeniedUnknownSubject;
    return decision;
  }

  std::set<std::string> roles = effective_roles(request.subject_id, request.at_ms);

  // Candidate rows: exact action/target match over the effective roles,
  // then drop rows whose context constraints fail. Identifier order keeps
  // every tie-break deterministic.
  const Permission* first_allow = nullptr;
  const Permission* first_forbid = nullptr;    // A- without active exception
  const Permission* first_exception = nullptr; // A- with active exception
  for (const auto& [_, p] : policy_.permissions()) {
    if (!roles.count(p.role)) continue;
    if (p.action != request.operation || p.target != request.object) continue;
    if (!evaluate_context(p.constraints, request.context)) continue;

    switch (p.mode) {
      case Mode::AuthPlus:
        if (!first_allow) first_allow = &p;
        break;
      case Mode::AuthMinus: {
        bool exception_active =
            p.exception && request.context.has_flag(*p.exception);
        if (exception_active) {
          if (!first_exception) first_exception = &p;
        } else {
          if (!first_forbid) first_forbid = &p;
        }
        break;
      }
      case Mode::ObligePlus:
      case Mode::ObligeMinus:
        decision.obligations.push_back(p.identifier);
        break;
    }
  }

  if (first_forbid) {  // deny-overrides
    decision.allowed = false;
    decision.matched_permission = first_forbid->identifier;
    decision.reason = DecisionReason::DeniedNegative;
  } else if (first_allow) {
    decision.allowed = true;
    decision.matched_permission = first_allow->identifier;
    decision.reason = DecisionReason::AllowedPositive;
  } else if (first_exception) {
    decision.allowed = true;
    decision.matched_permission = first_exception->identifier;
    decision.reason = DecisionReason::AllowedException;
  } else {
    decision.allowed = false;  // default deny
    decision.reason = DecisionReason::DeniedNoMatch;
  }
  return decision;
}

}  // namespace rolechain
