#include "doctest.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rolechain/parallel.hpp"
#include "support/oracle.hpp"

using namespace rolechain;
using rolechain::testing::make_random_context;
using rolechain::testing::make_random_universe;
using rolechain::testing::RandomUniverse;

namespace {

AccessRequest request_for(const std::string& subject, const std::string& op,
                          const std::string& object, SimMs at,
                          RequestContext context = {}) {
  AccessRequest r;
  r.subject_id = subject;
  r.operation = op;
  r.object = object;
  r.at_ms = at;
  r.context = std::move(context);
  return r;
}

}  // namespace

TEST_CASE("parallel batch decide matches the serial reference on random worlds") {
  std::mt19937_64 rng(20260816);
  for (int universe = 0; universe < 25; ++universe) {
    RandomUniverse u = make_random_universe(rng);
    PolicyView view(u.policy, u.delegations);

    std::vector<AccessRequest> batch;
    std::vector<std::string> subjects = u.subjects;
    subjects.push_back("ghost");  // unknown subject mixed into every batch
    int variant = 0;
    for (const std::string& subject : subjects)
      for (const std::string& op : u.actions)
        for (const std::string& object : u.objects) {
          SimMs at = 200 * static_cast<SimMs>(variant % 9);
          batch.push_back(request_for(subject, op, object, at,
                                      make_random_context(rng, variant % 3)));
          ++variant;
        }

    std::vector<Decision> serial = decide_batch_serial(view, batch);
    std::vector<Decision> parallel = decide_batch_parallel(view, batch);
    REQUIRE(serial.size() == batch.size());
    REQUIRE(serial == parallel);
    // Both kernels are plain maps of decide() over the batch, in order.
    for (std::size_t i = 0; i < batch.size(); ++i)
      REQUIRE(serial[i] == view.decide(batch[i]));
  }
}

TEST_CASE("parallel batch decide handles degenerate and large batches") {
  PolicyStore policy;
  DelegationStore delegations;
  PolicyView view(policy, delegations);

  policy.register_role("doctor");
  policy.note_subject("alice");
  policy.insert_assignment({"alice", "doctor", "issuer"});
  Permission p;
  p.identifier = "p1";
  p.mode = Mode::AuthPlus;
  p.role = "doctor";
  p.action = "read";
  p.target = "record";
  policy.insert_permission(p);

  SUBCASE("empty batch") {
    CHECK(decide_batch_serial(view, {}).empty());
    CHECK(decide_batch_parallel(view, {}).empty());
  }

  SUBCASE("large uniform batch keeps order and values") {
    std::vector<AccessRequest> batch;
    for (int i = 0; i < 5000; ++i)
      batch.push_back(request_for(i % 2 == 0 ? "alice" : "ghost", "read", "record", 50));
    std::vector<Decision> serial = decide_batch_serial(view, batch);
    std::vector<Decision> parallel = decide_batch_parallel(view, batch);
    REQUIRE(serial == parallel);
    CHECK(serial[0].allowed);
    CHECK(serial[0].matched_permission == std::optional<std::string>("p1"));
    CHECK_FALSE(serial[1].allowed);
    CHECK(serial[1].reason == DecisionReason::DeniedUnknownSubject);
  }
}

TEST_CASE("sharded constraint scan matches the serial scan on a crafted world") {
  PolicyStore policy;
  DelegationStore delegations;
  PolicyView view(policy, delegations);

  for (const char* role : {"a", "b", "c"}) policy.register_role(role);
  for (const char* subject : {"s1", "s2", "s3", "s4"}) policy.note_subject(subject);
  policy.insert_assignment({"s1", "a", "issuer"});
  policy.insert_assignment({"s1", "b", "issuer"});
  policy.insert_assignment({"s2", "b", "issuer"});
  policy.insert_assignment({"s3", "a", "issuer"});

  Delegation d;  // delegated role counts as playing it while live
  d.delegator = "s1";
  d.delegate = "s2";
  d.role = "c";
  d.expiry_ms = 5'000;
  delegations.insert(d);

  ConstraintSet constraints;
  REQUIRE(constraints.add_mutual_exclusion("a", "b", policy).ok());
  REQUIRE(constraints.add_mutual_exclusion("b", "c", policy).ok());
  // Variable-free body: satisfied outright once the fact is present.
  auto ground = ConstraintSet::parse_rule("ground", "junior(alpha, beta)");
  REQUIRE(ground.status.ok());
  REQUIRE(constraints.add_rule(ground.value.value()).ok());
  constraints.add_junior_fact("alpha", "beta");

  SUBCASE("both kernels report the full sorted set") {
    std::vector<Violation> serial = sod_scan_serial(constraints, view, 700);
    std::vector<Violation> parallel = sod_scan_parallel(constraints, view, 700);
    REQUIRE(serial == parallel);
    REQUIRE(serial == constraints.scan_all(view, 700));
    REQUIRE(serial.size() == 3);  // s1 on a|b, s2 on b|c, plus the ground rule
    CHECK(std::is_sorted(serial.begin(), serial.end()));

    bool saw_ground = false;
    bool saw_s1 = false;
    bool saw_s2 = false;
    for (const Violation& v : serial) {
      if (v.rule_id == "ground") {
        saw_ground = true;
        CHECK(v.binding.empty());
      }
      if (v.rule_id == "pair:a|b" && v.binding.at("S") == "s1") saw_s1 = true;
      if (v.rule_id == "pair:b|c" && v.binding.at("S") == "s2") saw_s2 = true;
    }
    CHECK(saw_ground);
    CHECK(saw_s1);
    CHECK(saw_s2);
  }

  SUBCASE("delegation expiry narrows both kernels the same way") {
    std::vector<Violation> serial = sod_scan_serial(constraints, view, 6'000);
    std::vector<Violation> parallel = sod_scan_parallel(constraints, view, 6'000);
    REQUIRE(serial == parallel);
    for (const Violation& v : serial) CHECK(v.rule_id != "pair:b|c");
  }
}

TEST_CASE("sharded constraint scan matches the serial scan on random worlds") {
  std::mt19937_64 rng(8833771);
  int compared = 0;
  for (int universe = 0; universe < 40; ++universe) {
    RandomUniverse u = make_random_universe(rng);
    if (u.roles.size() < 2) continue;
    PolicyView view(u.policy, u.delegations);

    ConstraintSet constraints;
    std::uniform_int_distribution<std::size_t> pick(0, u.roles.size() - 1);
    int registered = 0;
    for (int attempt = 0; attempt < 4 && registered < 2; ++attempt) {
      std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      if (i == j) continue;
      if (constraints.add_mutual_exclusion(u.roles[i], u.roles[j], u.policy).ok())
        ++registered;
    }
    if (registered == 0) continue;

    for (SimMs at : {SimMs{0}, SimMs{700}, SimMs{2'500}}) {
      std::vector<Violation> serial = sod_scan_serial(constraints, view, at);
      std::vector<Violation> parallel = sod_scan_parallel(constraints, view, at);
      REQUIRE(serial == parallel);
      REQUIRE(serial == constraints.scan_all(view, at));
      ++compared;
    }
  }
  CHECK(compared > 30);
}
