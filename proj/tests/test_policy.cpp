#include "doctest.h"
#include "rolechain/policy.hpp"

using namespace rolechain;

TEST_CASE("mode names round-trip through the parser") {
  for (Mode m : {Mode::AuthPlus, Mode::AuthMinus, Mode::ObligePlus, Mode::ObligeMinus}) {
    auto back = parse_mode(mode_name(m));
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
  CHECK(parse_mode("A+").value() == Mode::AuthPlus);
  CHECK(parse_mode("O-").value() == Mode::ObligeMinus);
  CHECK_FALSE(parse_mode("B+").has_value());
  CHECK_FALSE(parse_mode("").has_value());
  CHECK(is_authorization(Mode::AuthMinus));
  CHECK_FALSE(is_authorization(Mode::ObligePlus));
  CHECK(is_positive(Mode::ObligePlus));
  CHECK_FALSE(is_positive(Mode::AuthMinus));
}

TEST_CASE("hierarchy edges reject cycles and self-loops") {
  RoleHierarchy h;
  CHECK(h.add_edge("director", "manager").ok());
  CHECK(h.add_edge("manager", "clerk").ok());
  CHECK(h.add_edge("director", "director").code == Errc::CycleDetected);
  CHECK(h.add_edge("clerk", "director").code == Errc::CycleDetected);
  CHECK(h.add_edge("manager", "clerk").ok());  // re-adding is a no-op
  // an edge that merely converges is fine (DAG, not a tree)
  CHECK(h.add_edge("director", "clerk").ok());
}

TEST_CASE("reachability is transitive and irreflexive") {
  RoleHierarchy h;
  REQUIRE(h.add_edge("a", "b").ok());
  REQUIRE(h.add_edge("b", "c").ok());
  CHECK(h.reaches("a", "b"));
  CHECK(h.reaches("a", "c"));
  CHECK_FALSE(h.reaches("c", "a"));
  CHECK_FALSE(h.reaches("a", "a"));
  CHECK_FALSE(h.reaches("a", "unrelated"));
}

TEST_CASE("junior closure includes the roots themselves") {
  RoleHierarchy h;
  REQUIRE(h.add_edge("chief", "doctor").ok());
  REQUIRE(h.add_edge("doctor", "nurse").ok());
  REQUIRE(h.add_edge("admin", "nurse").ok());

  CHECK(h.junior_closure({"chief"}) ==
        std::set<std::string>{"chief", "doctor", "nurse"});
  CHECK(h.junior_closure({"doctor"}) == std::set<std::string>{"doctor", "nurse"});
  CHECK(h.junior_closure({"nurse"}) == std::set<std::string>{"nurse"});
  CHECK(h.junior_closure({}) == std::set<std::string>{});
  CHECK(h.junior_closure({"chief", "admin"}) ==
        std::set<std::string>{"chief", "admin", "doctor", "nurse"});
}

TEST_CASE("seniors_of lists exactly the roles that reach a role") {
  RoleHierarchy h;
  REQUIRE(h.add_edge("chief", "doctor").ok());
  REQUIRE(h.add_edge("doctor", "nurse").ok());
  REQUIRE(h.add_edge("admin", "nurse").ok());
  CHECK(h.seniors_of("nurse") == std::set<std::string>{"chief", "doctor", "admin"});
  CHECK(h.seniors_of("doctor") == std::set<std::string>{"chief"});
  CHECK(h.seniors_of("chief") == std::set<std::string>{});
}

TEST_CASE("removing an edge severs reachability") {
  RoleHierarchy h;
  REQUIRE(h.add_edge("a", "b").ok());
  REQUIRE(h.add_edge("b", "c").ok());
  CHECK(h.remove_edge("b", "c"));
  CHECK_FALSE(h.remove_edge("b", "c"));  // already gone
  CHECK_FALSE(h.reaches("a", "c"));
  CHECK(h.reaches("a", "b"));
}

TEST_CASE("assignments are unique per (subject, role)") {
  PolicyStore store;
  CHECK(store.insert_assignment({"alice", "doctor", "issuer", 0}));
  CHECK_FALSE(store.insert_assignment({"alice", "doctor", "issuer", 5}));
  CHECK(store.insert_assignment({"alice", "nurse", "issuer", 0}));
  CHECK(store.explicit_roles("alice") == std::set<std::string>{"doctor", "nurse"});
  CHECK(store.assignment_count("alice") == 2);
  CHECK(store.assignment_count("nobody") == 0);

  REQUIRE(store.find_assignment("alice", "doctor") != nullptr);
  CHECK(store.find_assignment("alice", "doctor")->assigned_by == "issuer");
  CHECK(store.find_assignment("alice", "surgeon") == nullptr);

  CHECK(store.erase_assignment("alice", "doctor"));
  CHECK_FALSE(store.erase_assignment("alice", "doctor"));
  CHECK(store.explicit_roles("alice") == std::set<std::string>{"nurse"});
}

TEST_CASE("subject registry only grows") {
  PolicyStore store;
  CHECK_FALSE(store.subject_known("alice"));
  store.note_subject("alice");
  CHECK(store.subject_known("alice"));
  REQUIRE(store.insert_assignment({"alice", "doctor", "issuer", 0}));
  store.note_subject("alice");  // idempotent
  CHECK(store.erase_assignment("alice", "doctor"));
  CHECK(store.subject_known("alice"));  // survives revocation
}

TEST_CASE("permission rows are keyed by identifier") {
  PolicyStore store;
  Permission p{"p1", Mode::AuthPlus, "doctor", "read", "record", {}, std::nullopt};
  CHECK(store.insert_permission(p));
  CHECK_FALSE(store.insert_permission(p));  // duplicate identifier
  Permission q{"p2", Mode::AuthMinus, "doctor", "write", "record", {}, "emergency"};
  REQUIRE(store.insert_permission(q));
  Permission r{"p3", Mode::ObligePlus, "nurse", "log", "record", {}, std::nullopt};
  REQUIRE(store.insert_permission(r));

  CHECK(store.permissions_for_role("doctor").size() == 2);
  CHECK(store.permissions_for_role("nurse").size() == 1);
  CHECK(store.permissions_for_role("ghost").empty());
  REQUIRE(store.find_permission("p2") != nullptr);
  CHECK(store.find_permission("p2")->exception == "emergency");
  CHECK(store.find_permission("p9") == nullptr);

  CHECK(store.erase_permission("p1"));
  CHECK_FALSE(store.erase_permission("p1"));
  CHECK(store.erase_permissions_for_role("doctor") == 1);  // just p2 left
  CHECK(store.erase_permissions_for_role("doctor") == 0);
  CHECK(store.permissions().size() == 1);
}

TEST_CASE("permission rows survive a JSON round-trip") {
  Permission p;
  p.identifier = "p7";
  p.mode = Mode::AuthMinus;
  p.role = "auditor";
  p.action = "export";
  p.target = "ledger";
  p.constraints.push_back(ContextCondition::parse("level ge i:3").value.value());
  p.constraints.push_back(
      ContextCondition::parse("dept in s:ward1,s:ward2").value.value());
  p.exception = "board_override";

  auto round = permission_from_json(permission_to_json(p));
  REQUIRE(round.ok());
  CHECK(round.value.value() == p);

  Permission bare{"p8", Mode::ObligeMinus, "clerk", "sign", "form", {}, std::nullopt};
  auto round2 = permission_from_json(permission_to_json(bare));
  REQUIRE(round2.ok());
  CHECK(round2.value.value() == bare);
}

TEST_CASE("malformed permission JSON is rejected") {
  ordered_json j = permission_to_json(
      {"p1", Mode::AuthPlus, "r", "a", "t", {}, std::nullopt});
  j.erase("mode");
  CHECK_FALSE(permission_from_json(j).ok());
  ordered_json bad_mode = permission_to_json(
      {"p1", Mode::AuthPlus, "r", "a", "t", {}, std::nullopt});
  bad_mode["mode"] = "Z+";
  CHECK_FALSE(permission_from_json(bad_mode).ok());
}
