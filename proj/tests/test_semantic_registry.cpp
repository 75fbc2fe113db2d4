#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "vso/error.hpp"
#include "vso/semantic_registry.hpp"

using namespace vso;
using vso::test::Rng;

namespace {
SemanticUri u(const std::string& s) { return SemanticUri(s); }
}  // namespace

TEST_CASE("identical uris are equal without any assertion") {
  EquivalenceRegistry r;
  CHECK(semantically_equal(r, u("urn:x:temp"), u("urn:x:temp")));
  CHECK_FALSE(semantically_equal(r, u("urn:x:temp"), u("urn:x:pressure")));
}

TEST_CASE("sameAs chains are transitive") {
  EquivalenceRegistry r;
  r.assert_same_as(u("urn:a"), u("urn:b"));
  r.assert_same_as(u("urn:b"), u("urn:c"));
  CHECK(semantically_equal(r, u("urn:a"), u("urn:c")));
  CHECK(semantically_equal(r, u("urn:c"), u("urn:a")));
  CHECK(r.class_count() == 1);
  CHECK(r.uri_count() == 3);
}

TEST_CASE("unbound uri is rejected") {
  EquivalenceRegistry r;
  try {
    semantically_equal(r, SemanticUri{}, u("urn:a"));
    FAIL("expected MissingUri");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_uri);
  }
}

TEST_CASE("self assertion is a no-op") {
  EquivalenceRegistry r;
  r.assert_same_as(u("urn:a"), u("urn:a"));
  CHECK(r.assertions().empty());
  CHECK(r.class_count() == 1);
}

TEST_CASE("assertions are stored in normalized order") {
  EquivalenceRegistry r;
  r.assert_same_as(u("urn:z"), u("urn:a"));
  r.assert_same_as(u("urn:a"), u("urn:z"));
  REQUIRE(r.assertions().size() == 1);
  CHECK(r.assertions().begin()->first == u("urn:a"));
}

TEST_CASE("with_same_as leaves the original untouched") {
  EquivalenceRegistry base;
  base.register_uri(u("urn:a"));
  base.register_uri(u("urn:b"));
  const EquivalenceRegistry next = base.with_same_as(u("urn:a"), u("urn:b"));
  CHECK_FALSE(base.equivalent(u("urn:a"), u("urn:b")));
  CHECK(next.equivalent(u("urn:a"), u("urn:b")));
}

TEST_CASE("classes partition the registered uris") {
  EquivalenceRegistry r;
  r.register_uri(u("urn:lone"));
  r.assert_same_as(u("urn:b"), u("urn:a"));
  const auto classes = r.classes();
  REQUIRE(classes.size() == 2);
  CHECK(classes[0] == std::vector{u("urn:a"), u("urn:b")});
  CHECK(classes[1] == std::vector{u("urn:lone")});
}

TEST_CASE("random assertion sets agree with graph search") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.between(2, 30);
    const auto assertions = vso::test::random_assertions(rng, n, rng.between(0, n));
    EquivalenceRegistry r;
    for (int i = 0; i < n; ++i) r.register_uri(u("urn:t:" + std::to_string(i)));
    for (const auto& [a, b] : assertions) r.assert_same_as(a, b);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto a = u("urn:t:" + std::to_string(i));
        const auto b = u("urn:t:" + std::to_string(j));
        REQUIRE(r.equivalent(a, b) == vso::test::oracle_same_as(assertions, a, b));
      }
    }
  }
}
