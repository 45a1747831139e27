#include "doctest.h"
#include "rolechain/delegation.hpp"

using namespace rolechain;

namespace {
Delegation basic(const std::string& delegator, const std::string& delegate,
                 const std::string& role) {
  Delegation d;
  d.delegator = delegator;
  d.delegate = delegate;
  d.role = role;
  return d;
}
}  // namespace

TEST_CASE("delegation modes parse both ways") {
  CHECK(delegation_mode_name(DelegationMode::Grant) == doctest::String("grant"));
  CHECK(delegation_mode_name(DelegationMode::Transfer) == doctest::String("transfer"));
  CHECK(parse_delegation_mode("grant").value() == DelegationMode::Grant);
  CHECK(parse_delegation_mode("transfer").value() == DelegationMode::Transfer);
  CHECK_FALSE(parse_delegation_mode("lend").has_value());
}

TEST_CASE("ids are assigned sequentially on insert") {
  DelegationStore store;
  CHECK(store.insert(basic("a", "b", "r")) == 1);
  CHECK(store.insert(basic("a", "c", "r")) == 2);
  REQUIRE(store.find(1) != nullptr);
  CHECK(store.find(1)->delegate == "b");
  CHECK(store.find(99) == nullptr);
}

TEST_CASE("liveness window is [start, expiry)") {
  DelegationStore store;
  Delegation d = basic("a", "b", "r");
  d.start_ms = 1'000;
  d.expiry_ms = 5'000;
  std::uint64_t id = store.insert(d);
  const Delegation& stored = *store.find(id);

  CHECK_FALSE(store.live(stored, 999));    // not started yet
  CHECK(store.live(stored, 1'000));        // start is inclusive
  CHECK(store.live(stored, 4'999));
  CHECK_FALSE(store.live(stored, 5'000));  // dead exactly at expiry
  CHECK_FALSE(store.live(stored, 6'000));
}

TEST_CASE("open-ended delegations are live from the start") {
  DelegationStore store;
  std::uint64_t id = store.insert(basic("a", "b", "r"));
  CHECK(store.live(*store.find(id), 0));
  CHECK(store.live(*store.find(id), 1'000'000'000));
}

TEST_CASE("a re-delegation is only live while its ancestors are") {
  DelegationStore store;
  Delegation root = basic("a", "b", "r");
  root.expiry_ms = 5'000;
  root.multi_step_delegatable = true;
  root.levels_of_delegation = 3;
  root.remaining_levels = 3;
  std::uint64_t root_id = store.insert(root);

  Delegation child = basic("b", "c", "r");
  child.parent_id = root_id;
  child.remaining_levels = 2;
  std::uint64_t child_id = store.insert(child);

  Delegation grandchild = basic("c", "d", "r");
  grandchild.parent_id = child_id;
  grandchild.remaining_levels = 1;
  std::uint64_t gc_id = store.insert(grandchild);

  CHECK(store.live(*store.find(gc_id), 4'000));
  // the root's expiry silences the whole chain even though the descendants
  // carry no expiry of their own
  CHECK_FALSE(store.live(*store.find(child_id), 5'000));
  CHECK_FALSE(store.live(*store.find(gc_id), 5'000));
}

TEST_CASE("live_to and live_by filter by party and time") {
  DelegationStore store;
  Delegation d1 = basic("a", "b", "r1");
  d1.expiry_ms = 1'000;
  store.insert(d1);
  store.insert(basic("a", "b", "r2"));
  store.insert(basic("x", "b", "r3"));
  store.insert(basic("a", "c", "r4"));

  auto to_b = store.live_to("b", 500);
  CHECK(to_b.size() == 3);
  auto to_b_late = store.live_to("b", 2'000);
  CHECK(to_b_late.size() == 2);  // r1 expired
  auto by_a = store.live_by("a", 2'000);
  CHECK(by_a.size() == 2);  // r2 to b, r4 to c
  CHECK(store.live_to("nobody", 0).empty());
}

TEST_CASE("remove_tree removes the whole chain, root first") {
  DelegationStore store;
  Delegation root = basic("a", "b", "r");
  root.multi_step_delegatable = true;
  root.remaining_levels = 3;
  std::uint64_t root_id = store.insert(root);
  Delegation c1 = basic("b", "c", "r");
  c1.parent_id = root_id;
  std::uint64_t c1_id = store.insert(c1);
  Delegation c2 = basic("b", "d", "r");
  c2.parent_id = root_id;
  store.insert(c2);
  Delegation gc = basic("c", "e", "r");
  gc.parent_id = c1_id;
  store.insert(gc);
  store.insert(basic("z", "q", "other"));  // unrelated survivor

  auto removed = store.remove_tree(root_id);
  REQUIRE(removed.size() == 4);
  CHECK(removed.front().id == root_id);
  CHECK(store.all().size() == 1);
  CHECK(store.find(root_id) == nullptr);
  CHECK(store.remove_tree(root_id).empty());  // already gone
}

TEST_CASE("expiry sweep removes due records and the orphans they leave") {
  DelegationStore store;
  Delegation root = basic("a", "b", "r");
  root.expiry_ms = 1'000;
  root.multi_step_delegatable = true;
  root.remaining_levels = 2;
  std::uint64_t root_id = store.insert(root);
  Delegation child = basic("b", "c", "r");  // no own expiry
  child.parent_id = root_id;
  std::uint64_t child_id = store.insert(child);
  Delegation stray = basic("x", "y", "s");
  stray.expiry_ms = 2'000;
  std::uint64_t stray_id = store.insert(stray);

  CHECK(store.expire_due(999).empty());

  auto removed = store.expire_due(1'000);
  REQUIRE(removed.size() == 2);  // root by expiry, child by orphaning
  CHECK(removed[0].id == root_id);
  CHECK(removed[1].id == child_id);
  CHECK(store.find(stray_id) != nullptr);

  auto removed2 = store.expire_due(5'000);
  REQUIRE(removed2.size() == 1);
  CHECK(removed2[0].id == stray_id);
  CHECK(store.all().empty());
}

TEST_CASE("revoking a delegator's roles cascades through their delegations") {
  DelegationStore store;
  std::uint64_t keep = store.insert(basic("alice", "bob", "keeper"));
  std::uint64_t gone = store.insert(basic("alice", "bob", "doctor"));
  Delegation child = basic("bob", "carol", "doctor");
  child.parent_id = gone;
  std::uint64_t child_id = store.insert(child);
  std::uint64_t other = store.insert(basic("dave", "bob", "doctor"));

  auto removed = store.remove_by_delegator_for_roles("alice", {"doctor", "nurse"});
  REQUIRE(removed.size() == 2);
  CHECK(removed[0].id == gone);
  CHECK(removed[1].id == child_id);
  CHECK(store.find(keep) != nullptr);
  CHECK(store.find(other) != nullptr);  // different delegator, untouched
}

TEST_CASE("delegations survive a JSON round-trip") {
  Delegation d = basic("alice", "bob", "doctor");
  d.id = 42;
  d.start_ms = 100;
  d.expiry_ms = 9'000;
  d.mode = DelegationMode::Transfer;
  d.multi_step_delegatable = true;
  d.levels_of_delegation = 5;
  d.remaining_levels = 3;
  d.parent_id = 7;

  auto round = delegation_from_json(delegation_to_json(d));
  REQUIRE(round.ok());
  const Delegation& r = round.value.value();
  CHECK(r.id == d.id);
  CHECK(r.delegator == d.delegator);
  CHECK(r.delegate == d.delegate);
  CHECK(r.role == d.role);
  CHECK(r.start_ms == d.start_ms);
  CHECK(r.expiry_ms == d.expiry_ms);
  CHECK(r.mode == d.mode);
  CHECK(r.multi_step_delegatable == d.multi_step_delegatable);
  CHECK(r.levels_of_delegation == d.levels_of_delegation);
  CHECK(r.remaining_levels == d.remaining_levels);
  CHECK(r.parent_id == d.parent_id);

  Delegation bare = basic("a", "b", "r");
  bare.id = 1;
  auto round2 = delegation_from_json(delegation_to_json(bare));
  REQUIRE(round2.ok());
  CHECK(round2.value.value().parent_id == std::nullopt);
  CHECK(round2.value.value().start_ms == std::nullopt);
}
