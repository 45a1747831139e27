#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "rolechain/bundle.hpp"

using namespace rolechain;

namespace {

EngineConfig bundle_config() {
  EngineConfig cfg;
  cfg.genesis_time_ms = 1'000'000;
  cfg.block_interval_ms = 500;
  cfg.blocks_per_turn = 6;
  cfg.producers = {"prods"};
  cfg.issuer_account = "issuer";
  return cfg;
}

Engine make_engine() {
  Engine engine(bundle_config());
  REQUIRE(engine.create_account("issuer", 1'000'000).ok());
  REQUIRE(engine.create_account("alice", 100'000).ok());
  REQUIRE(engine.register_role("doctor").ok());
  return engine;
}

std::string write_bundle(const char* name, const std::string& body) {
  std::string path = std::string("/tmp/rolechain_test_bundle_") + name + ".jsonl";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("a bundle of valid lines applies in order, one block per line") {
  Engine engine = make_engine();
  const std::string path = write_bundle(
      "ok",
      R"({"kind":"role_assign","sender":"issuer","payload":{"subject_id":"alice","role_name":"doctor"}}
{"kind":"permission_assign","sender":"issuer","payload":{"permission":{"identifier":"p1","mode":"A+","role":"doctor","action":"read","target":"record"}}}
{"kind":"check_access","sender":"issuer","payload":{"subject_id":"alice","operation":"read","object":"record"}}
{"kind":"right_transfer","sender":"alice","payload":{"delegator":"alice","delegate":"bob","role":"doctor"}}
{"kind":"remove_right_transfer","sender":"alice","payload":{"delegation_id":1}}
)");

  BundleOutcome outcome = load_bundle(engine, path);
  CHECK(outcome.ok());
  CHECK(outcome.applied == 5);
  CHECK_FALSE(outcome.failed_line.has_value());

  CHECK(engine.ledger().height() == 5);
  CHECK(engine.policy().find_assignment("alice", "doctor") != nullptr);
  CHECK(engine.policy().find_permission("p1") != nullptr);
  CHECK(engine.delegations().all().empty());  // granted on line 4, removed on line 5

  ordered_json j = outcome.to_json();
  CHECK(j["applied"] == 5);
  CHECK(j["failed_line"].is_null());
  CHECK(j["error"].is_null());
  std::remove(path.c_str());
}

TEST_CASE("loading stops at the first line whose transaction is refused") {
  Engine engine = make_engine();
  // line 3 repeats line 1's assignment; line 4 would succeed but must not run
  const std::string path = write_bundle(
      "refused",
      R"({"kind":"role_assign","sender":"issuer","payload":{"subject_id":"alice","role_name":"doctor"}}
{"kind":"permission_assign","sender":"issuer","payload":{"permission":{"identifier":"p1","mode":"A+","role":"doctor","action":"read","target":"record"}}}
{"kind":"role_assign","sender":"issuer","payload":{"subject_id":"alice","role_name":"doctor"}}
{"kind":"role_assign","sender":"issuer","payload":{"subject_id":"bob","role_name":"doctor"}}
)");

  BundleOutcome outcome = load_bundle(engine, path);
  CHECK_FALSE(outcome.ok());
  CHECK(outcome.applied == 2);
  REQUIRE(outcome.failed_line.has_value());
  CHECK(*outcome.failed_line == 3);
  CHECK(outcome.error.code == Errc::DuplicateAssignment);

  // fail-fast: the earlier lines stay committed, the later one never ran
  CHECK(engine.policy().find_permission("p1") != nullptr);
  CHECK(engine.policy().find_assignment("bob", "doctor") == nullptr);

  ordered_json j = outcome.to_json();
  CHECK(j["failed_line"] == 3);
  CHECK(j["error"]["code"] == "DuplicateAssignment");
  std::remove(path.c_str());
}

TEST_CASE("malformed lines are reported by physical line number") {
  Engine engine = make_engine();

  SUBCASE("bad json") {
    const std::string path = write_bundle("badjson", "\n{not json at all\n");
    BundleOutcome outcome = load_bundle(engine, path);
    CHECK(outcome.applied == 0);
    REQUIRE(outcome.failed_line.has_value());
    CHECK(*outcome.failed_line == 2);  // the leading blank line still counts
    CHECK(outcome.error.code == Errc::ParseError);
    std::remove(path.c_str());
  }

  SUBCASE("missing required field") {
    const std::string path = write_bundle(
        "nofield", R"({"kind":"role_assign","payload":{"subject_id":"a","role_name":"doctor"}})"
                   "\n");
    BundleOutcome outcome = load_bundle(engine, path);
    CHECK(outcome.applied == 0);
    CHECK(outcome.failed_line == std::optional<std::uint64_t>(1));
    CHECK(outcome.error.code == Errc::ParseError);
    std::remove(path.c_str());
  }

  SUBCASE("unknown kind") {
    const std::string path = write_bundle(
        "badkind", R"({"kind":"role-assign","sender":"issuer","payload":{}})" "\n");
    BundleOutcome outcome = load_bundle(engine, path);
    CHECK(outcome.failed_line == std::optional<std::uint64_t>(1));
    CHECK(outcome.error.code == Errc::ParseError);
    std::remove(path.c_str());
  }

  SUBCASE("unknown sender is refused at submission") {
    const std::string path = write_bundle(
        "ghost",
        R"({"kind":"role_assign","sender":"issuer","payload":{"subject_id":"a","role_name":"doctor"}}
{"kind":"check_access","sender":"ghost","payload":{"subject_id":"a","operation":"read","object":"r"}}
)");
    BundleOutcome outcome = load_bundle(engine, path);
    CHECK(outcome.applied == 1);
    CHECK(outcome.failed_line == std::optional<std::uint64_t>(2));
    CHECK(outcome.error.code == Errc::UnknownAccount);
    std::remove(path.c_str());
  }
}

TEST_CASE("empty bundles and missing files") {
  Engine engine = make_engine();

  SUBCASE("empty file applies nothing and succeeds") {
    const std::string path = write_bundle("empty", "");
    BundleOutcome outcome = load_bundle(engine, path);
    CHECK(outcome.ok());
    CHECK(outcome.applied == 0);
    CHECK_FALSE(outcome.failed_line.has_value());
    CHECK(engine.ledger().height() == 0);
    std::remove(path.c_str());
  }

  SUBCASE("blank lines are skipped without counting as applied") {
    const std::string path = write_bundle(
        "blanks",
        "\n"
        R"({"kind":"role_assign","sender":"issuer","payload":{"subject_id":"a","role_name":"doctor"}})"
        "\n\n");
    BundleOutcome outcome = load_bundle(engine, path);
    CHECK(outcome.ok());
    CHECK(outcome.applied == 1);
    std::remove(path.c_str());
  }

  SUBCASE("missing file is an io error") {
    BundleOutcome outcome = load_bundle(engine, "/tmp/rolechain_no_such_bundle.jsonl");
    CHECK_FALSE(outcome.ok());
    CHECK(outcome.error.code == Errc::IoError);
    CHECK(outcome.applied == 0);
    CHECK_FALSE(outcome.failed_line.has_value());
  }
}

TEST_CASE("lenient lines: omitted timestamps and signatures are filled in") {
  Engine engine = make_engine();
  // explicit timestamp + explicit correct signature on one line,
  // everything defaulted on the next
  Transaction tx = make_transaction(
      "issuer", engine.ledger().next_block_time_ms(),
      TxPayload{RoleAssignPayload{"carol", "doctor"}});
  ordered_json line1 = transaction_to_json(tx);

  const std::string path = write_bundle(
      "lenient",
      line1.dump() + "\n" +
          R"({"kind":"role_assign","sender":"issuer","payload":{"subject_id":"dave","role_name":"doctor"}})" +
          "\n");
  BundleOutcome outcome = load_bundle(engine, path);
  CHECK(outcome.ok());
  CHECK(outcome.applied == 2);
  CHECK(engine.policy().find_assignment("carol", "doctor") != nullptr);
  CHECK(engine.policy().find_assignment("dave", "doctor") != nullptr);
  std::remove(path.c_str());
}
