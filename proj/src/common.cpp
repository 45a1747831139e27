#include "rolechain/common.hpp"

namespace rolechain {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::Ok: return "Ok";
    case Errc::UnknownAccount: return "UnknownAccount";
    case Errc::DuplicateAccount: return "DuplicateAccount";
    case Errc::InvalidAccountName: return "InvalidAccountName";
    case Errc::BadSignature: return "BadSignature";
    case Errc::InsufficientResources: return "InsufficientResources";
    case Errc::RamDelegationForbidden: return "RamDelegationForbidden";
    case Errc::ClockRegression: return "ClockRegression";
    case Errc::BlockNotDue: return "BlockNotDue";
    case Errc::NotIssuer: return "NotIssuer";
    case Errc::UnknownRole: return "UnknownRole";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::DuplicateAssignment: return "DuplicateAssignment";
    case Errc::NoExistingAssignment: return "NoExistingAssignment";
    case Errc::AmbiguousAssignment: return "AmbiguousAssignment";
    case Errc::SoDViolation: return "SoDViolation";
    case Errc::CardinalityExceeded: return "CardinalityExceeded";
    case Errc::DuplicateIdentifier: return "DuplicateIdentifier";
    case Errc::UnknownIdentifier: return "UnknownIdentifier";
    case Errc::NoPermissionsForRole: return "NoPermissionsForRole";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::NotRoleHolder: return "NotRoleHolder";
    case Errc::ObligationNotDelegable: return "ObligationNotDelegable";
    case Errc::SingleStepExhausted: return "SingleStepExhausted";
    case Errc::ExpiredParent: return "ExpiredParent";
    case Errc::NotAuthorizedRevoker: return "NotAuthorizedRevoker";
    case Errc::UnknownDelegation: return "UnknownDelegation";
    case Errc::DegenerateRule: return "DegenerateRule";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::DegenerateWindow: return "DegenerateWindow";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::ParseError: return "ParseError";
    case Errc::UsageError: return "UsageError";
    case Errc::IoError: return "IoError";
    case Errc::ReplayMismatch: return "ReplayMismatch";
  }
  return "Unknown";
}

}  // namespace rolechain
