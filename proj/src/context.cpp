#include "rolechain/context.hpp"

#include <charconv>
#include <cstdio>

namespace rolechain {

namespace {

std::optional<int> parse_int_field(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> Date::parse(std::string_view text) {
  auto parts = split(text, '-');
  if (parts.size() != 3) return std::nullopt;
  auto y = parse_int_field(parts[0]);
  auto m = parse_int_field(parts[1]);
  auto d = parse_int_field(parts[2]);
  if (!y || !m || !d) return std::nullopt;
  if (*m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string TimeOfDay::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

std::optional<TimeOfDay> TimeOfDay::parse(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) return std::nullopt;
  auto h = parse_int_field(parts[0]);
  auto m = parse_int_field(parts[1]);
  if (!h || !m) return std::nullopt;
  if (*h < 0 || *h > 23 || *m < 0 || *m > 59) return std::nullopt;
  return TimeOfDay{*h * 60 + *m};
}

std::string value_to_string(const ContextValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return "i:" + std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) return "s:" + *s;
  if (const auto* d = std::get_if<Date>(&v)) return "d:" + d->to_string();
  return "t:" + std::get<TimeOfDay>(v).to_string();
}

std::optional<ContextValue> parse_typed_value(std::string_view text) {
  if (text.size() < 2 || text[1] != ':') return std::nullopt;
  char tag = text[0];
  std::string_view body = text.substr(2);
  switch (tag) {
    case 'i': {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec != std::errc() || p != body.data() + body.size()) return std::nullopt;
      return ContextValue{v};
    }
    case 's':
      return ContextValue{std::string(body)};
    case 'd': {
      auto d = Date::parse(body);
      if (!d) return std::nullopt;
      return ContextValue{*d};
    }
    case 't': {
      auto t = TimeOfDay::parse(body);
      if (!t) return std::nullopt;
      return ContextValue{*t};
    }
    default:
      return std::nullopt;
  }
}

bool value_eq(const ContextValue& a, const ContextValue& b) {
  return a == b;
}

std::optional<bool> value_less(const ContextValue& a, const ContextValue& b) {
  if (a.index() != b.index()) return std::nullopt;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        return lhs < std::get<T>(b);
      },
      a);
}

const char* comparator_name(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "eq";
    case Comparator::Ne: return "ne";
    case Comparator::Lt: return "lt";
    case Comparator::Le: return "le";
    case Comparator::Gt: return "gt";
    case Comparator::Ge: return "ge";
    case Comparator::InRange: return "range";
    case Comparator::InSet: return "in";
  }
  return "eq";
}

std::optional<Comparator> parse_comparator(std::string_view text) {
  if (text == "eq" || text == "=") return Comparator::Eq;
  if (text == "ne" || text == "!=") return Comparator::Ne;
  if (text == "lt" || text == "<") return Comparator::Lt;
  if (text == "le" || text == "<=") return Comparator::Le;
  if (text == "gt" || text == ">") return Comparator::Gt;
  if (text == "ge" || text == ">=") return Comparator::Ge;
  if (text == "range") return Comparator::InRange;
  if (text == "in") return Comparator::InSet;
  return std::nullopt;
}

std::string ContextCondition::to_string() const {
  std::string out = attribute;
  out += ' ';
  out += comparator_name(comparator);
  out += ' ';
  if (comparator == Comparator::InRange && expected.size() == 2) {
    out += value_to_string(expected[0]) + ".." + value_to_string(expected[1]);
  } else {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out += ',';
      out += value_to_string(expected[i]);
    }
  }
  return out;
}

Result<ContextCondition> ContextCondition::parse(std::string_view text) {
  text = trim(text);
  std::size_t sp1 = text.find(' ');
  if (sp1 == std::string_view::npos)
    return Result<ContextCondition>::fail(Errc::ParseError, "expected 'attr op value'");
  std::size_t sp2 = text.find(' ', sp1 + 1);
  if (sp2 == std::string_view::npos)
    return Result<ContextCondition>::fail(Errc::ParseError, "expected 'attr op value'");

  ContextCondition cond;
  cond.attribute = std::string(trim(text.substr(0, sp1)));
  auto cmp = parse_comparator(trim(text.substr(sp1 + 1, sp2 - sp1 - 1)));
  if (!cmp)
    return Result<ContextCondition>::fail(Errc::ParseError, "unknown comparator");
  cond.comparator = *cmp;

  std::string_view rest = trim(text.substr(sp2 + 1));
  if (cond.comparator == Comparator::InRange) {
    std::size_t dots = rest.find("..");
    if (dots == std::string_view::npos)
      return Result<ContextCondition>::fail(Errc::ParseError, "range needs lo..hi");
    auto lo = parse_typed_value(trim(rest.substr(0, dots)));
    auto hi = parse_typed_value(trim(rest.substr(dots + 2)));
    if (!lo || !hi)
      return Result<ContextCondition>::fail(Errc::ParseError, "bad range bound");
    if (lo->index() != hi->index())
      return Result<ContextCondition>::fail(Errc::ParseError, "range bounds of mixed type");
    cond.expected = {*lo, *hi};
  } else if (cond.comparator == Comparator::InSet) {
    for (auto piece : split(rest, ',')) {
      auto v = parse_typed_value(trim(piece));
      if (!v) return Result<ContextCondition>::fail(Errc::ParseError, "bad set member");
      cond.expected.push_back(*v);
    }
    if (cond.expected.empty())
      return Result<ContextCondition>::fail(Errc::ParseError, "empty set");
  } else {
    auto v = parse_typed_value(rest);
    if (!v) return Result<ContextCondition>::fail(Errc::ParseError, "bad value");
    cond.expected = {*v};
  }
  return Result<ContextCondition>::success(std::move(cond));
}

bool evaluate_condition(const ContextCondition& cond, const RequestContext& ctx) {
  auto it = ctx.attributes.find(cond.attribute);
  if (it == ctx.attributes.end()) return false;  // absent attribute never satisfies
  const ContextValue& actual = it->second;

  switch (cond.comparator) {
    case Comparator::Eq:
      return cond.expected.size() == 1 && value_eq(actual, cond.expected[0]);
    case Comparator::Ne:
      return cond.expected.size() == 1 &&
             actual.index() == cond.expected[0].index() &&
             !value_eq(actual, cond.expected[0]);
    case Comparator::Lt: {
      if (cond.expected.size() != 1) return false;
      auto lt = value_less(actual, cond.expected[0]);
      return lt.value_or(false);
    }
    case Comparator::Le: {
      if (cond.expected.size() != 1) return false;
      auto gt = value_less(cond.expected[0], actual);
      if (!gt) return false;
      return !*gt;
    }
    case Comparator::Gt: {
      if (cond.expected.size() != 1) return false;
      auto gt = value_less(cond.expected[0], actual);
      return gt.value_or(false);
    }
    case Comparator::Ge: {
      if (cond.expected.size() != 1) return false;
      auto lt = value_less(actual, cond.expected[0]);
      if (!lt) return false;
      return !*lt;
    }
    case Comparator::InRange: {
      if (cond.expected.size() != 2) return false;
      auto below = value_less(actual, cond.expected[0]);
      auto above = value_less(cond.expected[1], actual);
      if (!below || !above) return false;
      return !*below && !*above;  // inclusive bounds
    }
    case Comparator::InSet: {
      for (const auto& member : cond.expected)
        if (value_eq(actual, member)) return true;
      return false;
    }
  }
  return false;
}

bool evaluate_context(std::span<const ContextCondition> conditions,
                      const RequestContext& ctx) {
  for (const auto& cond : conditions)
    if (!evaluate_condition(cond, ctx)) return false;
  return true;
}

ordered_json value_to_json(const ContextValue& v) {
  return value_to_string(v);
}

Result<ContextValue> value_from_json(const ordered_json& j) {
  if (!j.is_string())
    return Result<ContextValue>::fail(Errc::ParseError, "context value must be a string");
  auto v = parse_typed_value(j.get<std::string>());
  if (!v) return Result<ContextValue>::fail(Errc::ParseError, "bad typed value");
  return Result<ContextValue>::success(*v);
}

ordered_json condition_to_json(const ContextCondition& c) {
  ordered_json j;
  j["attribute"] = c.attribute;
  j["comparator"] = comparator_name(c.comparator);
  ordered_json vals = ordered_json::array();
  for (const auto& v : c.expected) vals.push_back(value_to_json(v));
  j["expected"] = std::move(vals);
  return j;
}

Result<ContextCondition> condition_from_json(const ordered_json& j) {
  ContextCondition c;
  if (!j.is_object() || !j.contains("attribute") || !j.contains("comparator") ||
      !j.contains("expected"))
    return Result<ContextCondition>::fail(Errc::ParseError, "bad condition object");
  c.attribute = j["attribute"].get<std::string>();
  auto cmp = parse_comparator(j["comparator"].get<std::string>());
  if (!cmp) return Result<ContextCondition>::fail(Errc::ParseError, "bad comparator");
  c.comparator = *cmp;
  for (const auto& jv : j["expected"]) {
    auto v = value_from_json(jv);
    if (!v.ok()) return Result<ContextCondition>::fail(v.status);
    c.expected.push_back(*v.value);
  }
  return Result<ContextCondition>::success(std::move(c));
}

ordered_json request_context_to_json(const RequestContext& ctx) {
  ordered_json j;
  ordered_json attrs = ordered_json::object();
  for (const auto& [k, v] : ctx.attributes) attrs[k] = value_to_json(v);
  j["attributes"] = std::move(attrs);
  ordered_json flags = ordered_json::array();
  for (const auto& f : ctx.active_flags) flags.push_back(f);
  j["flags"] = std::move(flags);
  return j;
}

Result<RequestContext> request_context_from_json(const ordered_json& j) {
  RequestContext ctx;
  if (!j.is_object())
    return Result<RequestContext>::fail(Errc::ParseError, "bad context object");
  if (j.contains("attributes")) {
    for (auto it = j["attributes"].begin(); it != j["attributes"].end(); ++it) {
      auto v = value_from_json(it.value());
      if (!v.ok()) return Result<RequestContext>::fail(v.status);
      ctx.attributes.emplace(it.key(), *v.value);
    }
  }
  if (j.contains("flags")) {
    for (const auto& f : j["flags"]) ctx.active_flags.insert(f.get<std::string>());
  }
  return Result<RequestContext>::success(std::move(ctx));
}

}  // namespace rolechain
