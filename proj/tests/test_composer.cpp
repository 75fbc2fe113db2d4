#include <doctest.h>

#include <algorithm>

#include "fig2.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "vso/catalog_store.hpp"
#include "vso/composer.hpp"
#include "vso/error.hpp"

using namespace vso;
using namespace vso::test;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

Endpoint ep(const std::string& text) { return parse_endpoint(text); }

std::vector<std::string> names(const std::vector<Parameter>& params) {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(to_string(p.address));
  return out;
}

}  // namespace

TEST_CASE("instantiation numbers instances per image") {
  const Catalog c = fig2_catalog();
  Environment env;
  CHECK(instantiate(env, c, "o1") == "o1#1");
  CHECK(instantiate(env, c, "o1") == "o1#2");
  CHECK(instantiate(env, c, "o2") == "o2#1");
  const auto& inst = env.instance("o1#1");
  CHECK(inst.enabled_models == std::set<std::string>{"m1", "m2", "m3"});
  CHECK(inst.method_choice.at("m1") == "s2");
  CHECK(code_of([&] { instantiate(env, c, "o9"); }) == ErrorCode::unknown_image);
  CHECK(code_of([&] { env.instance("o9#1"); }) == ErrorCode::unknown_instance);
}

TEST_CASE("the default environment suggests exactly the track link") {
  const Catalog c = fig2_catalog();
  const Environment env = fig2_env(c);
  const auto suggestions = suggest_connections(env, c);
  REQUIRE(suggestions.size() == 1);
  CHECK(to_string(suggestions[0].source) == "o1#1:m3/s5[0].track");
  CHECK(to_string(suggestions[0].target) == "o2#1:m4/s7[0].track");
}

TEST_CASE("accepting the suggestion connects the objects") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_env(c);
  const auto applied = apply_all_suggestions(env, c);
  REQUIRE(applied.size() == 1);
  CHECK(env.connections.size() == 1);
  CHECK(suggest_connections(env, c).empty());
  CHECK(lifted_view(env, c, Level::object) == ConnSet{{"o1#1", "o2#1"}});
}

TEST_CASE("connection errors") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_env(c);
  SUBCASE("semantic mismatch") {
    CHECK(code_of([&] { connect(env, c, ep("o1#1:m1/s2[0].field"), ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::semantic_mismatch);
  }
  SUBCASE("sameAs makes state feed initial-state") {
    choose_method(env, c, "o1#1", "m3", "s4");
    connect(env, c, ep("o1#1:m1/s2[1].state"), ep("o1#1:m3/s4[0].init"));
    CHECK(env.connections.size() == 1);
  }
  SUBCASE("occupied input") {
    connect(env, c, ep("o1#1:m3/s5[0].track"), ep("o2#1:m4/s7[0].track"));
    Environment before = env;
    CHECK(code_of([&] { connect(env, c, ep("o1#1:m3/s5[0].track"), ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::input_occupied);
    CHECK(env == before);
  }
  SUBCASE("implicitly fed input counts as occupied") {
    CHECK(code_of([&] { connect(env, c, ep("o1#1:m1/s2[0].field"), ep("o1#1:m1/s2[1].field")); }) ==
          ErrorCode::input_occupied);
  }
  SUBCASE("endpoint must exist and be active") {
    CHECK(code_of([&] { connect(env, c, ep("o1#1:m1/s2[5].state"), ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::unknown_endpoint);
    CHECK(code_of([&] { connect(env, c, ep("o1#1:m3/s4[1].track"), ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::unknown_endpoint);
    CHECK(code_of([&] { connect(env, c, ep("o3#1:m3/s5[0].track"), ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::unknown_endpoint);
    CHECK(code_of([&] { connect(env, c, ep("o1#1:@mass"), ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::unknown_endpoint);
  }
  SUBCASE("disconnect") {
    connect(env, c, ep("o1#1:m3/s5[0].track"), ep("o2#1:m4/s7[0].track"));
    disconnect(env, ep("o2#1:m4/s7[0].track"));
    CHECK(env.connections.empty());
    CHECK(code_of([&] { disconnect(env, ep("o2#1:m4/s7[0].track")); }) ==
          ErrorCode::unknown_endpoint);
  }
}

TEST_CASE("object-level gesture") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_env(c);
  const Connection conn = connect_objects(env, c, "o1#1", "o2#1");
  CHECK(to_string(conn.target) == "o2#1:m4/s7[0].track");
  CHECK(code_of([&] { connect_objects(env, c, "o2#1", "o1#1"); }) == ErrorCode::semantic_mismatch);

  Environment two = fig2_env(c);
  choose_method(two, c, "o1#1", "m3", "s4");
  instantiate(two, c, "o2");
  CHECK_NOTHROW(connect_objects(two, c, "o1#1", "o2#2"));
}

TEST_CASE("ambiguous object-level gesture") {
  Catalog c = fig2_catalog();
  // two track producers: its own m3 and the one inside the nested o1
  c.images.emplace("o3", VsoImage{"o3", {}, {"m3"}, {"o1"}});
  Environment env;
  instantiate(env, c, "o3");
  instantiate(env, c, "o2");
  CHECK(code_of([&] { connect_objects(env, c, "o3#1", "o2#1"); }) ==
        ErrorCode::ambiguous_connection);
}

TEST_CASE("visible parameters hide set, fed and consumed ones") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_env(c);
  const ParamSets before = visible_params(env, c, "o1#1", Level::object);
  CHECK(names(before.inputs).empty());
  CHECK(names(before.outputs) == std::vector<std::string>{"@mass", "m1/s2[1].state",
                                                         "m2/s3[1].forcing", "m3/s5[0].track"});
  apply_all_suggestions(env, c);
  const ParamSets after = visible_params(env, c, "o1#1", Level::object);
  CHECK(names(after.outputs) ==
        std::vector<std::string>{"@mass", "m1/s2[1].state", "m2/s3[1].forcing"});
  const ParamSets model_level = visible_params(env, c, "o1#1", Level::model);
  CHECK(names(model_level.outputs) == std::vector<std::string>{"m1/s2[1].state", "m2/s3[1].forcing"});
  const ParamSets raw = visible_params(env, c, "o1#1", Level::ip);
  CHECK(raw.inputs.size() == 5);
  CHECK(raw.outputs.size() == 5);
  CHECK(code_of([&] { visible_params(env, c, "zz#1", Level::object); }) ==
        ErrorCode::unknown_instance);
}

TEST_CASE("toggling models and choosing methods") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_env(c);
  set_model_enabled(env, c, "o1#1", "m2", false);
  CHECK_FALSE(env.instance("o1#1").enabled_models.contains("m2"));
  CHECK(code_of([&] { choose_method(env, c, "o1#1", "m2", "s3"); }) == ErrorCode::invalid_argument);
  set_model_enabled(env, c, "o1#1", "m2", true);
  CHECK(env.instance("o1#1").method_choice.at("m2") == "s3");
  CHECK(code_of([&] { set_model_enabled(env, c, "o1#1", "m4", true); }) == ErrorCode::unknown_model);
  CHECK(code_of([&] { choose_method(env, c, "o1#1", "m1", "s7"); }) == ErrorCode::unknown_method);
  choose_method(env, c, "o1#1", "m1", "s1");
  CHECK(current_configuration(env, c).key() ==
        "o1#1:m1=s1,o1#1:m2=s3,o1#1:m3=s5,o2#1:m4=s7");
}

TEST_CASE("connections to a deselected method become dormant") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_linked_env(c);
  choose_method(env, c, "o1#1", "m1", "s1");
  CHECK(env.connections.size() == 2);
  CHECK(lifted_view(env, c, Level::method) == ConnSet{{"o1#1/m3/s5", "o2#1/m4/s7"}});
  CHECK(validate_environment(env, c).ok());
}

TEST_CASE("lifting the linked fixture through every level") {
  const Catalog c = fig2_catalog();
  const Environment env = fig2_linked_env(c);
  CHECK(lifted_view(env, c, Level::method) ==
        ConnSet{{"o1#1/m1/s2", "o1#1/m3/s5"}, {"o1#1/m3/s5", "o2#1/m4/s7"}});
  CHECK(lifted_view(env, c, Level::model) ==
        ConnSet{{"o1#1/m1", "o1#1/m3"}, {"o1#1/m3", "o2#1/m4"}});
  CHECK(lifted_view(env, c, Level::object) == ConnSet{{"o1#1", "o2#1"}});
  const auto ip = lifted_view(env, c, Level::ip);
  CHECK(ip.contains({"o1#1/m1/s2/ip4@0", "o1#1/m1/s2/ip5@1"}));
  CHECK(ip.contains({"o1#1/m3/s5/ip10@0", "o2#1/m4/s7/ip14@0"}));
}

TEST_CASE("lift_connections drops self pairs and rejects unmapped elements") {
  const MembershipMap parent{{"a1", "A"}, {"a2", "A"}, {"b1", "B"}};
  CHECK(lift_connections({{"a1", "a2"}, {"a2", "b1"}}, parent) == ConnSet{{"A", "B"}});
  CHECK(lift_connections({}, parent).empty());
  CHECK(code_of([&] { lift_connections({{"a1", "zz"}}, parent); }) == ErrorCode::unmapped_element);
}

TEST_CASE("membership maps each level to the one above") {
  const Catalog c = fig2_catalog();
  const Environment env = fig2_chain_env(c);
  const auto methods = membership(env, c, Level::method);
  CHECK(methods.at("o1#1/m3/s5") == "o1#1/m3");
  CHECK(membership(env, c, Level::ip).at("o2#1/m4/s7/ip15@1") == "o2#1/m4/s7");
  CHECK(membership(env, c, Level::model).at("o2#1/m4") == "o2#1");
  CHECK(code_of([&] { membership(env, c, Level::object); }) == ErrorCode::invalid_argument);
}

TEST_CASE("endpoint text round-trips") {
  for (const std::string text : {"o1#1:m1/s2[1].state", "o2#3:child/m4/s7[0].track", "o1#1:@mass"}) {
    CHECK(to_string(parse_endpoint(text)) == text);
  }
  CHECK(code_of([] { parse_endpoint("nocolon"); }) == ErrorCode::invalid_argument);
  CHECK(parse_level("method") == Level::method);
  CHECK(code_of([] { parse_level("PACKAGE"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("environment validation catches tampering") {
  const Catalog c = fig2_catalog();
  Environment env = fig2_linked_env(c);
  CHECK(validate_environment(env, c).ok());
  env.connections.push_back(env.connections.front());
  CHECK(validate_environment(env, c).to_string().find("InputOccupied") != std::string::npos);
  Environment bad = fig2_env(c);
  bad.instances.at("o1#1").method_choice["m1"] = "s7";
  CHECK(validate_environment(bad, c).contains("DanglingReference: o1#1:m1→s7"));
}

TEST_CASE("random environments: visible parameters match independently computed feeds") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const Catalog c = random_catalog(rng);
    const Environment env = random_environment(rng, c);
    const auto [fed, sources] = oracle_feeds(env, c);
    for (const auto& [id, inst] : env.instances) {
      const FlatIo raw = flatten(visible_params(env, c, id, Level::ip));
      for (Level level : {Level::method, Level::model, Level::object}) {
        const ParamSets vis = visible_params(env, c, id, level);
        for (const auto& p : vis.inputs) {
          if (p.address.kind == ParamKind::property) {
            REQUIRE(level == Level::object);
          } else {
            REQUIRE_FALSE(p.value.has_value());
            REQUIRE_FALSE(fed.contains(id + ":" + to_string(p.address)));
            REQUIRE(raw.inputs.contains({to_string(p.address), p.uri.str(), p.value}));
          }
        }
        for (const auto& p : vis.outputs) {
          if (p.address.kind == ParamKind::package) {
            REQUIRE_FALSE(sources.contains(id + ":" + to_string(p.address)));
            REQUIRE(raw.outputs.contains({to_string(p.address), p.uri.str(), p.value}));
          }
        }
      }
    }
  }
}

TEST_CASE("suggestions are cross-instance semantic matches of visible endpoints") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Catalog c = random_catalog(rng);
    Environment env = random_environment(rng, c);
    const auto suggestions = suggest_connections(env, c);
    for (const auto& s : suggestions) {
      REQUIRE(s.source.instance != s.target.instance);
      REQUIRE(c.registry.equivalent(s.source_uri, s.target_uri));
    }
    apply_all_suggestions(env, c);
    REQUIRE(validate_environment(env, c).ok());
    REQUIRE(suggest_connections(env, c).empty());
  }
}
