#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rolechain/common.hpp"

namespace rolechain {

using ordered_json = nlohmann::ordered_json;

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
  std::string to_string() const;                     // YYYY-MM-DD
  static std::optional<Date> parse(std::string_view text);
};

struct TimeOfDay {
  int minutes = 0;  // minutes past midnight

  auto operator<=>(const TimeOfDay&) const = default;
  std::string to_string() const;                     // HH:MM
  static std::optional<TimeOfDay> parse(std::string_view text);
};

/// A typed attribute value. The prefix form used by the CLI and all file
/// formats is "i:42", "s:ward3", "d:2026-01-05", "t:09:30".
using ContextValue = std::variant<std::int64_t, std::string, Date, TimeOfDay>;

std::string value_to_string(const ContextValue& v);  // prefix form
std::optional<ContextValue> parse_typed_value(std::string_view text);
bool value_eq(const ContextValue& a, const ContextValue& b);
/// Strict weak ordering within one type; values of different types never
/// compare (ordered comparators on mismatched types evaluate to false).
std::optional<bool> value_less(const ContextValue& a, const ContextValue& b);

enum class Comparator : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge, InRange, InSet };

const char* comparator_name(Comparator c);           // eq ne lt le gt ge range in
std::optional<Comparator> parse_comparator(std::string_view text);

/// One conjunct of a permission's context constraint list.
/// `expected` holds one value, two for InRange (inclusive bounds), or the
/// member list for InSet.
struct ContextCondition {
  std::string attribute;
  Comparator comparator = Comparator::Eq;
  std::vector<ContextValue> expected;

  bool operator==(const ContextCondition&) const = default;
  std::string to_string() const;                     // "attr op value[,value…]"
  static Result<ContextCondition> parse(std::string_view text);
};

/// Caller-supplied facts an access request is evaluated against.
/// `active_flags` carries exception condition names currently in force.
struct RequestContext {
  std::map<std::string, ContextValue> attributes;
  std::set<std::string> active_flags;

  bool has_flag(const std::string& name) const { return active_flags.count(name) > 0; }
};

/// Missing attribute or type mismatch makes the condition false.
bool evaluate_condition(const ContextCondition& cond, const RequestContext& ctx);
/// Conjunction; an empty list is satisfied.
bool evaluate_context(std::span<const ContextCondition> conditions,
                      const RequestContext& ctx);

ordered_json value_to_json(const ContextValue& v);
Result<ContextValue> value_from_json(const ordered_json& j);
ordered_json condition_to_json(const ContextCondition& c);
Result<ContextCondition> condition_from_json(const ordered_json& j);
ordered_json request_context_to_json(const RequestContext& ctx);
Result<RequestContext> request_context_from_json(const ordered_json& j);

}  // namespace rolechain
