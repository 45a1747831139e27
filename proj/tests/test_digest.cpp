#include "doctest.h"
#include "rolechain/digest.hpp"

using namespace rolechain;

TEST_CASE("sha3-256 matches published test vectors") {
  CHECK(to_hex(sha3_256("")) ==
        "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
  CHECK(to_hex(sha3_256("abc")) ==
        "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
}

TEST_CASE("hex encoding round-trips") {
  Digest d = sha3_256("round trip");
  auto back = digest_from_hex(to_hex(d));
  REQUIRE(back.has_value());
  CHECK(*back == d);
  CHECK_FALSE(digest_from_hex("abc").has_value());       // wrong length
  CHECK_FALSE(digest_from_hex(std::string(64, 'x')).has_value());  // bad chars
}

TEST_CASE("canonical encoding is deterministic and unambiguous") {
  CanonicalWriter a;
  a.str("ab");
  a.str("c");
  CanonicalWriter b;
  b.str("a");
  b.str("bc");
  // same concatenated characters, different field boundaries
  CHECK(a.bytes() != b.bytes());
  CHECK(a.digest() != b.digest());

  CanonicalWriter c1, c2;
  for (CanonicalWriter* w : {&c1, &c2}) {
    w->u8(7);
    w->u64(1234567);
    w->str("same");
    w->opt_u64(std::nullopt);
    w->opt_str(std::string("x"));
  }
  CHECK(c1.bytes() == c2.bytes());
  CHECK(c1.digest() == c2.digest());
}

TEST_CASE("optional fields encode presence distinctly from values") {
  CanonicalWriter none, zero;
  none.opt_u64(std::nullopt);
  zero.opt_u64(std::uint64_t{0});
  CHECK(none.bytes() != zero.bytes());
}
