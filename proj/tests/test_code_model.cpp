#include <doctest.h>

#include <refrev/code_model.hpp>
#include <refrev/errors.hpp>

#include "sample.hpp"

using namespace refrev;
using nlohmann::json;

namespace {

json two_classes() {
    return json::parse(R"({
      "classes": [
        {"id": "a.Shop", "file": "a/Shop.java", "fields": [{"id": "a.Shop.stock", "name": "stock", "type": "int"}],
         "methods": [{"id": "a.Shop#sell", "name": "sell", "params": ["int"]}]},
        {"id": "a.Till", "file": "a/Till.java",
         "methods": [{"id": "a.Till#ring", "name": "ring", "params": []}]}
      ],
      "edges": [{"from": "a.Till#ring", "to": "a.Shop#sell", "kind": "invoke"}]
    })");
}

} // namespace

TEST_SUITE("code_model") {

TEST_CASE("facts with two classes and one edge load as given") {
    auto facts = parse_code_facts(two_classes());
    CHECK(facts.model.class_count() == 2);
    CHECK(facts.model.member_count() == 3);
    CHECK(facts.graph.size() == 1);

    auto ring = facts.model.find_member("a.Till#ring");
    auto sell = facts.model.find_member("a.Shop#sell");
    REQUIRE(ring);
    REQUIRE(sell);
    REQUIRE(facts.graph.successors(*ring).size() == 1);
    CHECK(facts.graph.successors(*ring)[0] == *sell);
    CHECK(facts.graph.predecessors(*sell)[0] == *ring);
    CHECK(facts.model.owner(*sell) == *facts.model.find_class("a.Shop"));
}

TEST_CASE("an inheritance cycle is rejected") {
    auto doc = json::parse(R"({"classes": [
        {"id": "A", "file": "A.java", "superclass": "B"},
        {"id": "B", "file": "B.java", "superclass": "A"}]})");
    CHECK_THROWS_WITH_AS(parse_code_facts(doc), doctest::Contains("inheritance cycle"), ValidationError);
}

TEST_CASE("an empty class list is a valid empty model") {
    auto facts = parse_code_facts(json::parse(R"({"classes": []})"));
    CHECK(facts.model.class_count() == 0);
    CHECK(facts.model.internal_classes().empty());
    CHECK(facts.graph.size() == 0);
}

TEST_CASE("malformed and dangling facts are reported") {
    CHECK_THROWS_AS(parse_code_facts(std::string_view("{not json")), ParseError);
    CHECK_THROWS_AS(parse_code_facts(json::parse(R"({"classes": [{"id": "A", "file": "A.java", "superclass": "Gone"}]})")),
                    ValidationError);

    auto dup = two_classes();
    dup["classes"][1]["methods"][0]["id"] = "a.Shop#sell";
    CHECK_THROWS_AS(parse_code_facts(dup), ValidationError);

    auto bad_edge = two_classes();
    bad_edge["edges"][0]["kind"] = "access";
    CHECK_THROWS_WITH_AS(parse_code_facts(bad_edge), doctest::Contains("access edge must target a field"),
                         ValidationError);

    auto overloaded = two_classes();
    overloaded["classes"][0]["methods"].push_back({{"id", "a.Shop#sell2"}, {"name", "sell"}, {"params", {"int"}}});
    CHECK_THROWS_AS(parse_code_facts(overloaded), ValidationError);

    CHECK_THROWS_AS(load_code_facts("/nonexistent/facts.json"), InputError);
}

TEST_CASE("class_file resolves co-located classes to one path") {
    auto facts = load_code_facts(sample::glide_dir() / "facts.json");
    const auto& active = class_file(facts.model, "ActiveResources");
    CHECK(active == "library/src/main/java/com/bumptech/glide/load/engine/ActiveResources.java");
    CHECK(class_file(facts.model, "ResourceWeakReference") == active);
    CHECK(class_file(facts.model, "EngineResource") != active);
    CHECK_THROWS_AS(class_file(facts.model, "NoSuchClass"), UnknownIdError);
}

TEST_CASE("facts survive a round trip through JSON") {
    auto facts = parse_code_facts(sample::hierarchy_facts());
    auto again = parse_code_facts(to_json(facts.model, facts.graph));
    CHECK(again.model == facts.model);
    CHECK(again.graph == facts.graph);
    CHECK(again.model.superclass(*again.model.find_class("Leaf")) == again.model.find_class("Mid"));
}

TEST_CASE("ancestry queries follow superclass links") {
    auto facts = parse_code_facts(sample::hierarchy_facts());
    const auto& m = facts.model;
    const auto base = *m.find_class("Base"), mid = *m.find_class("Mid"), leaf = *m.find_class("Leaf");
    CHECK(m.is_ancestor(base, leaf));
    CHECK(m.is_ancestor(mid, leaf));
    CHECK_FALSE(m.is_ancestor(leaf, base));
    CHECK(m.direct_subclasses(base) == std::vector<ClassId>{mid});
    CHECK(m.members_of(mid).size() == 3);
}

}
