#include "doctest.h"
#include "rolechain/context.hpp"

using namespace rolechain;

TEST_CASE("typed values parse by prefix and round-trip") {
  auto i = parse_typed_value("i:42");
  REQUIRE(i.has_value());
  CHECK(std::get<std::int64_t>(*i) == 42);
  CHECK(value_to_string(*i) == "i:42");

  auto s = parse_typed_value("s:ward3");
  REQUIRE(s.has_value());
  CHECK(std::get<std::string>(*s) == "ward3");

  auto d = parse_typed_value("d:2026-01-05");
  REQUIRE(d.has_value());
  CHECK(std::get<Date>(*d) == Date{2026, 1, 5});
  CHECK(value_to_string(*d) == "d:2026-01-05");

  auto t = parse_typed_value("t:09:30");
  REQUIRE(t.has_value());
  CHECK(std::get<TimeOfDay>(*t).minutes == 9 * 60 + 30);
  CHECK(value_to_string(*t) == "t:09:30");

  CHECK_FALSE(parse_typed_value("x:1").has_value());
  CHECK_FALSE(parse_typed_value("noprefix").has_value());
  CHECK_FALSE(parse_typed_value("i:notanumber").has_value());
  CHECK_FALSE(parse_typed_value("d:2026-13-40").has_value());
  CHECK_FALSE(parse_typed_value("t:25:00").has_value());
}

TEST_CASE("values of different types never satisfy ordered comparators") {
  CHECK_FALSE(value_eq(ContextValue(std::int64_t(1)), ContextValue(std::string("1"))));
  CHECK_FALSE(
      value_less(ContextValue(std::int64_t(1)), ContextValue(std::string("2")))
          .has_value());
}

namespace {

ContextCondition cond(std::string attr, Comparator cmp,
                      std::vector<ContextValue> expected) {
  ContextCondition c;
  c.attribute = std::move(attr);
  c.comparator = cmp;
  c.expected = std::move(expected);
  return c;
}

RequestContext ctx_with(std::string key, ContextValue v) {
  RequestContext ctx;
  ctx.attributes[std::move(key)] = std::move(v);
  return ctx;
}

}  // namespace

TEST_CASE("comparator truth table on integers") {
  const RequestContext ctx = ctx_with("level", ContextValue(std::int64_t(3)));
  auto holds = [&](Comparator cmp, std::int64_t expected) {
    return evaluate_condition(cond("level", cmp, {ContextValue(expected)}), ctx);
  };
  CHECK(holds(Comparator::Eq, 3));
  CHECK_FALSE(holds(Comparator::Eq, 4));
  CHECK(holds(Comparator::Ne, 4));
  CHECK_FALSE(holds(Comparator::Ne, 3));
  CHECK(holds(Comparator::Lt, 4));
  CHECK_FALSE(holds(Comparator::Lt, 3));
  CHECK(holds(Comparator::Le, 3));
  CHECK_FALSE(holds(Comparator::Le, 2));
  CHECK(holds(Comparator::Gt, 2));
  CHECK_FALSE(holds(Comparator::Gt, 3));
  CHECK(holds(Comparator::Ge, 3));
  CHECK_FALSE(holds(Comparator::Ge, 4));
}

TEST_CASE("range bounds are inclusive on both ends") {
  auto in_range = [](std::int64_t v) {
    const RequestContext ctx = ctx_with("level", ContextValue(v));
    return evaluate_condition(
        cond("level", Comparator::InRange,
             {ContextValue(std::int64_t(2)), ContextValue(std::int64_t(5))}),
        ctx);
  };
  CHECK_FALSE(in_range(1));
  CHECK(in_range(2));
  CHECK(in_range(3));
  CHECK(in_range(5));
  CHECK_FALSE(in_range(6));
}

TEST_CASE("set membership tests each member independently") {
  const ContextCondition c =
      cond("dept", Comparator::InSet,
           {ContextValue(std::string("ward1")), ContextValue(std::string("ward3"))});
  CHECK(evaluate_condition(c, ctx_with("dept", ContextValue(std::string("ward3")))));
  CHECK_FALSE(
      evaluate_condition(c, ctx_with("dept", ContextValue(std::string("ward2")))));
  // an integer never equals any string member
  CHECK_FALSE(evaluate_condition(c, ctx_with("dept", ContextValue(std::int64_t(1)))));
}

TEST_CASE("missing attribute and type mismatch both fail the condition") {
  const ContextCondition c =
      cond("level", Comparator::Eq, {ContextValue(std::int64_t(3))});
  CHECK_FALSE(evaluate_condition(c, RequestContext{}));
  CHECK_FALSE(
      evaluate_condition(c, ctx_with("level", ContextValue(std::string("3")))));
}

TEST_CASE("an empty condition list is satisfied") {
  std::vector<ContextCondition> none;
  CHECK(evaluate_context(none, RequestContext{}));
}

TEST_CASE("dates and times order correctly") {
  const RequestContext ctx = ctx_with("date", ContextValue(Date{2026, 6, 15}));
  CHECK(evaluate_condition(cond("date", Comparator::InRange,
                                {ContextValue(Date{2026, 1, 1}),
                                 ContextValue(Date{2026, 12, 31})}),
                           ctx));
  CHECK_FALSE(evaluate_condition(
      cond("date", Comparator::Lt, {ContextValue(Date{2026, 6, 15})}), ctx));

  const RequestContext when = ctx_with("time", ContextValue(TimeOfDay{9 * 60 + 30}));
  CHECK(evaluate_condition(
      cond("time", Comparator::Ge, {ContextValue(TimeOfDay{9 * 60})}), when));
  CHECK_FALSE(evaluate_condition(
      cond("time", Comparator::Gt, {ContextValue(TimeOfDay{10 * 60})}), when));
}

TEST_CASE("condition text form parses and round-trips") {
  auto parsed = ContextCondition::parse("level ge i:2");
  REQUIRE(parsed.ok());
  CHECK(parsed.value->attribute == "level");
  CHECK(parsed.value->comparator == Comparator::Ge);
  CHECK(parsed.value->to_string() == "level ge i:2");

  auto range = ContextCondition::parse("date range d:2026-01-01..d:2026-12-31");
  REQUIRE(range.ok());
  CHECK(range.value->expected.size() == 2);

  auto set = ContextCondition::parse("dept in s:ward1,s:ward3");
  REQUIRE(set.ok());
  CHECK(set.value->expected.size() == 2);

  CHECK_FALSE(ContextCondition::parse("").ok());
  CHECK_FALSE(ContextCondition::parse("level").ok());
  CHECK_FALSE(ContextCondition::parse("level badop i:2").ok());
  CHECK_FALSE(ContextCondition::parse("level ge notyped").ok());
  CHECK_FALSE(ContextCondition::parse("level range i:1").ok());
}

TEST_CASE("conditions and request contexts survive json round-trips") {
  auto parsed = ContextCondition::parse("time range t:08:00..t:17:00");
  REQUIRE(parsed.ok());
  auto back = condition_from_json(condition_to_json(*parsed.value));
  REQUIRE(back.ok());
  CHECK(back.value->to_string() == parsed.value->to_string());

  RequestContext ctx;
  ctx.attributes["level"] = ContextValue(std::int64_t(4));
  ctx.attributes["dept"] = ContextValue(std::string("ward1"));
  ctx.active_flags.insert("override");
  auto ctx_back = request_context_from_json(request_context_to_json(ctx));
  REQUIRE(ctx_back.ok());
  CHECK(ctx_back.value->attributes.size() == 2);
  CHECK(ctx_back.value->has_flag("override"));
}
