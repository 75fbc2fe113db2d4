#include <doctest.h>

#include <algorithm>

#include "fig2.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "vso/error.hpp"
#include "vso/model.hpp"

using namespace vso;
using namespace vso::test;

namespace {

std::vector<std::string> names(const std::vector<Parameter>& params) {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(to_string(p.address));
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("fixture catalog is valid") {
  const Catalog c = fig2_catalog();
  CHECK(validate_catalog(c).ok());
}

TEST_CASE("method IO is the union of its packages' parameters") {
  const Catalog c = fig2_catalog();
  const ParamSets io = derive_method_io(c.method("s2"), c);
  CHECK(names(io.inputs) == std::vector<std::string>{"s2[0].mesh", "s2[1].field"});
  CHECK(names(io.outputs) == std::vector<std::string>{"s2[0].field", "s2[1].state"});
  CHECK(io.inputs[0].value == "grid.dat");
  CHECK_FALSE(io.inputs[1].value.has_value());
  CHECK(io.inputs[0].package == "ip4");
}

TEST_CASE("the same package twice in a method keeps both occurrences") {
  Catalog c = fig2_catalog();
  c.methods.emplace("twice", Method{"twice", {"ip2", "ip2"}});
  const ParamSets io = derive_method_io(c.method("twice"), c);
  CHECK(names(io.inputs) == std::vector<std::string>{"twice[0].u1", "twice[1].u1"});
}

TEST_CASE("model IO follows the selected method") {
  const Catalog c = fig2_catalog();
  CHECK(derive_model_io(c.model("m4"), c) == derive_method_io(c.method("s7"), c));
  CHECK(derive_model_io(c.model("m4"), "s6", c) == derive_method_io(c.method("s6"), c));
  CHECK(code_of([&] { derive_model_io(c.model("m4"), "s1", c); }) == ErrorCode::unknown_method);
}

TEST_CASE("model without a selected method") {
  Catalog c = fig2_catalog();
  c.models.at("m2").selected_method.clear();
  CHECK(code_of([&] { derive_model_io(c.model("m2"), c); }) == ErrorCode::no_method_selected);
  CHECK(validate_catalog(c).contains("NoMethodSelected: m2"));
}

TEST_CASE("object IO unions enabled models and properties") {
  const Catalog c = fig2_catalog();
  const ParamSets io = derive_vso_io(c.image("o1"), c);
  CHECK(names(io.inputs) == std::vector<std::string>{"@mass", "m1/s2[0].mesh", "m1/s2[1].field",
                                                     "m2/s3[0].params", "m2/s3[1].p6",
                                                     "m3/s5[0].state"});
  CHECK(names(io.outputs) == std::vector<std::string>{"@mass", "m1/s2[0].field", "m1/s2[1].state",
                                                      "m2/s3[0].p6", "m2/s3[1].forcing",
                                                      "m3/s5[0].track"});
  const ParamSets only_m3 = derive_vso_io(c.image("o1"), std::set<std::string>{"m3"}, c);
  CHECK(names(only_m3.inputs) == std::vector<std::string>{"@mass", "m3/s5[0].state"});
}

TEST_CASE("composite object IO includes its children under their paths") {
  Catalog c = fig2_catalog();
  c.images.emplace("ship", VsoImage{"ship", {}, {"m2"}, {"o1", "o2"}});
  const ParamSets io = derive_vso_io(c.image("ship"), c);
  const auto in = names(io.inputs);
  CHECK(std::count(in.begin(), in.end(), "m2/s3[0].params") == 1);
  CHECK(std::count(in.begin(), in.end(), "o1/m2/s3[0].params") == 1);
  CHECK(std::count(in.begin(), in.end(), "o2/m4/s7[0].track") == 1);
  CHECK(std::count(in.begin(), in.end(), "o2/@length") == 1);
  const auto out = names(io.outputs);
  CHECK(std::count(out.begin(), out.end(), "o2/m4/s7[1].response") == 1);
  CHECK(model_slots(c.image("ship"), c) ==
        std::vector<std::string>{"m2", "o1/m1", "o1/m2", "o1/m3", "o2/m4"});
  CHECK(&model_at_slot(c.image("ship"), "o2/m4", c) == &c.model("m4"));
  CHECK(code_of([&] { model_at_slot(c.image("ship"), "o3/m4", c); }) ==
        ErrorCode::dangling_reference);
}

TEST_CASE("containment cycles are rejected") {
  Catalog c = fig2_catalog();
  c.images.at("o1").children.insert("o2");
  c.images.at("o2").children.insert("o1");
  CHECK(code_of([&] { derive_vso_io(c.image("o1"), c); }) == ErrorCode::cyclic_containment);
  CHECK(validate_catalog(c).contains("CyclicContainment: o1→o2→o1"));
}

TEST_CASE("enabling an unknown slot is a dangling reference") {
  const Catalog c = fig2_catalog();
  CHECK(code_of([&] { derive_vso_io(c.image("o1"), std::set<std::string>{"m9"}, c); }) ==
        ErrorCode::dangling_reference);
}

TEST_CASE("effective value prefers the implementing default") {
  Catalog c = fig2_catalog();
  c.software_packages.at("sp2").inputs[0].value = "from-sp";
  const auto& ip2 = c.implementing_package("ip2");
  CHECK(c.effective_value(ip2, ip2.inputs[0]) == "from-sp");
  const auto& ip4 = c.implementing_package("ip4");
  c.software_packages.at("sp4").inputs[0].value = "ignored";
  CHECK(c.effective_value(ip4, ip4.inputs[0]) == "grid.dat");
}

TEST_CASE("parameter addresses round-trip through text") {
  for (const std::string text :
       {"s2[1].state", "m1/s2[0].mesh", "o2/m4/s7[10].track", "@mass", "o2/@length"}) {
    CHECK(to_string(parse_param_address(text)) == text);
  }
  for (const std::string bad : {"", "s2", "s2[x].a", "[0].a", "s2[0].", "o1/@", "s2[0]a"}) {
    CHECK(code_of([&] { parse_param_address(bad); }) == ErrorCode::invalid_argument);
  }
}

TEST_CASE("validation reports each broken invariant") {
  SUBCASE("dangling package in a method") {
    Catalog c = fig2_catalog();
    c.methods.at("s2").packages.push_back("ip99");
    CHECK(validate_catalog(c).contains("DanglingReference: s2→ip99"));
  }
  SUBCASE("implementing package input not on its software package") {
    Catalog c = fig2_catalog();
    c.implementing_packages.at("ip1").inputs.push_back({"x", {}, SemanticUri("urn:fig2:x")});
    CHECK(validate_catalog(c).contains("DanglingReference: ip1→sp1.x"));
  }
  SUBCASE("software input left unwrapped") {
    Catalog c = fig2_catalog();
    c.software_packages.at("sp1").inputs.push_back({"y", {}});
    CHECK(validate_catalog(c).contains("PartialInheritance: ip1 does not wrap sp1.y"));
  }
  SUBCASE("package without outputs") {
    Catalog c = fig2_catalog();
    c.software_packages.at("sp3").outputs.clear();
    c.implementing_packages.at("ip3").outputs.clear();
    const auto report = validate_catalog(c);
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("MissingOutput") != std::string::npos);
  }
  SUBCASE("unbound uri") {
    Catalog c = fig2_catalog();
    c.implementing_packages.at("ip5").outputs[0].uri = SemanticUri{};
    CHECK(validate_catalog(c).to_string().find("MissingUri") != std::string::npos);
  }
  SUBCASE("empty method and selected method outside the model") {
    Catalog c = fig2_catalog();
    c.methods.at("s5").packages.clear();
    c.models.at("m1").selected_method = "s3";
    const auto report = validate_catalog(c);
    CHECK(report.to_string().find("EmptySequence") != std::string::npos);
    CHECK(report.to_string().find("SelectedMethodNotInModel") != std::string::npos);
  }
  SUBCASE("bad ids") {
    Catalog c = fig2_catalog();
    c.methods.emplace("bad id", Method{"bad id", {"ip1"}});
    CHECK(validate_catalog(c).contains("InvalidId: 'bad id'"));
  }
}

TEST_CASE("random catalogs derive the same IO as the recursive union") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Catalog c = random_catalog(rng);
    REQUIRE(validate_catalog(c).ok());
    for (const auto& [id, method] : c.methods) {
      REQUIRE(flatten(derive_method_io(method, c)) == oracle_method_io(c, id));
    }
    for (const auto& [id, image] : c.images) {
      const auto slots = model_slots(image, c);
      const std::set<std::string> all(slots.begin(), slots.end());
      REQUIRE(flatten(derive_vso_io(image, c)) == oracle_vso_io(c, id, all, {}));
    }
  }
}
