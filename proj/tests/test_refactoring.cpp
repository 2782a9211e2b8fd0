#include <doctest.h>

#include <fstream>

#include <refrev/code_model.hpp>
#include <refrev/errors.hpp>
#include <refrev/refactoring.hpp>

#include "sample.hpp"

using namespace refrev;

namespace {

struct Glide {
    CodeFacts facts = load_code_facts(sample::glide_dir() / "facts.json");
    ClassId active = *facts.model.find_class("ActiveResources");
    ClassId weak = *facts.model.find_class("ResourceWeakReference");
    ClassId engine_resource = *facts.model.find_class("EngineResource");
    MemberId cleanup = *facts.model.find_member("ActiveResources#cleanupActiveReference");
    MemberId deactivate = *facts.model.find_member("ActiveResources#deactivate");
};

struct Hierarchy {
    CodeFacts facts = parse_code_facts(sample::hierarchy_facts());
    ClassId base = *facts.model.find_class("Base");
    ClassId mid = *facts.model.find_class("Mid");
    ClassId leaf = *facts.model.find_class("Leaf");
    ClassId helper = *facts.model.find_class("Helper");
};

} // namespace

TEST_SUITE("refactoring") {

TEST_CASE("kind names and arities") {
    for (auto k : kAllRefactoringKinds) CHECK(parse_refactoring_kind(to_string(k)) == k);
    CHECK_FALSE(parse_refactoring_kind("ExtractClass"));
    CHECK(arity(RefactoringKind::Null) == 0);
    CHECK(arity(RefactoringKind::InlineClass) == 2);
    CHECK(arity(RefactoringKind::PushDownField) == 3);
    CHECK(member_kind_of(RefactoringKind::PullUpMethod) == MemberKind::Method);
    CHECK(member_kind_of(RefactoringKind::MoveField) == MemberKind::Field);
    CHECK_FALSE(member_kind_of(RefactoringKind::InlineClass));
}

TEST_CASE("moving cleanupActiveReference to its co-located class is applicable") {
    Glide g;
    auto op = RefactoringOp::with_member(RefactoringKind::MoveMethod, g.active, g.weak, g.cleanup);
    CHECK(is_applicable(op, g.facts.model));
}

TEST_CASE("same source and target is never applicable") {
    Glide g;
    CHECK_FALSE(is_applicable(RefactoringOp::with_member(RefactoringKind::MoveMethod, g.active, g.active, g.cleanup),
                              g.facts.model));
    CHECK_FALSE(is_applicable(RefactoringOp::inline_class(g.active, g.active), g.facts.model));
}

TEST_CASE("pull up needs the target to be the direct superclass") {
    Hierarchy h;
    const auto bump = *h.facts.model.find_member("Mid#bump");
    const auto render = *h.facts.model.find_member("Leaf#render");
    CHECK(is_applicable(RefactoringOp::with_member(RefactoringKind::PullUpMethod, h.mid, h.base, bump), h.facts.model));
    CHECK_FALSE(
        is_applicable(RefactoringOp::with_member(RefactoringKind::PullUpMethod, h.leaf, h.base, render), h.facts.model));
    CHECK_FALSE(
        is_applicable(RefactoringOp::with_member(RefactoringKind::PullUpMethod, h.mid, h.helper, bump), h.facts.model));
    CHECK(is_applicable(RefactoringOp::with_member(RefactoringKind::PushDownMethod, h.mid, h.leaf, bump),
                        h.facts.model));
    // A method whose kind does not match the op's member table.
    CHECK_FALSE(is_applicable(RefactoringOp::with_member(RefactoringKind::MoveField, h.mid, h.helper, bump),
                              h.facts.model));
}

TEST_CASE("move field rehomes the member and leaves edges alone") {
    Hierarchy h;
    const auto count = *h.facts.model.find_member("Mid.count");
    auto r = apply(RefactoringOp::with_member(RefactoringKind::MoveField, h.mid, h.helper, count), h.facts.model,
                   h.facts.graph);
    REQUIRE(r.applied);
    CHECK(r.model.owner(count) == h.helper);
    CHECK(r.model.members_of(h.mid).size() == 2);
    CHECK(r.model.members_of(h.helper).size() == 3);
    CHECK(r.graph == h.facts.graph);
    CHECK(h.facts.model.owner(count) == h.mid);
}

TEST_CASE("inline class moves every member and reparents the children") {
    Hierarchy h;
    const auto before_helper = h.facts.model.members_of(h.helper).size();
    const auto before_mid = h.facts.model.members_of(h.mid).size();
    REQUIRE(before_helper == 2);
    REQUIRE(before_mid == 3);

    auto r = apply(RefactoringOp::inline_class(h.mid, h.helper), h.facts.model, h.facts.graph);
    REQUIRE(r.applied);
    CHECK_FALSE(r.model.is_live(h.mid));
    CHECK(r.model.members_of(h.helper).size() == 5);
    CHECK(r.model.members_of(h.mid).empty());
    CHECK(r.model.superclass(h.leaf) == h.base);
    CHECK(r.model.internal_classes().size() == 3);
    // Any later op naming the removed class is dead.
    const auto bump = *h.facts.model.find_member("Mid#bump");
    CHECK_FALSE(is_applicable(RefactoringOp::with_member(RefactoringKind::MoveMethod, h.mid, h.base, bump), r.model));
}

TEST_CASE("inlining into a subclass is refused") {
    Hierarchy h;
    CHECK_FALSE(is_applicable(RefactoringOp::inline_class(h.base, h.leaf), h.facts.model));
}

TEST_CASE("null is the identity") {
    Hierarchy h;
    auto r = apply(RefactoringOp::null(), h.facts.model, h.facts.graph);
    CHECK_FALSE(r.applied);
    CHECK(r.model == h.facts.model);

    Solution nulls{std::vector<RefactoringOp>(5, RefactoringOp::null())};
    auto s = apply_sequence(nulls, h.facts.model);
    CHECK(s.model == h.facts.model);
    CHECK(s.effective.empty());
}

TEST_CASE("a repeated move is a no-op the second time") {
    Hierarchy h;
    const auto format = *h.facts.model.find_member("Helper#format");
    auto op = RefactoringOp::with_member(RefactoringKind::MoveMethod, h.helper, h.base, format);
    auto s = apply_sequence(Solution{{op, op}}, h.facts.model);
    REQUIRE(s.effective.size() == 1);
    CHECK(s.effective[0] == op);
    CHECK(s.model.owner(format) == h.base);
}

TEST_CASE("the glide solution applies both moves") {
    Glide g;
    std::ifstream in(sample::glide_dir() / "solution.json");
    auto doc = nlohmann::json::parse(in);
    Solution s;
    for (const auto& gene : doc["genes"]) s.genes.push_back(op_from_json(gene, g.facts.model));
    REQUIRE(s.genes.size() == 2);
    auto r = apply_sequence(s, g.facts.model);
    CHECK(r.effective.size() == 2);
    CHECK(r.model.owner(g.cleanup) == g.weak);
    CHECK(r.model.owner(g.deactivate) == g.engine_resource);
}

TEST_CASE("inverse ops restore the model") {
    Hierarchy h;
    const auto bump = *h.facts.model.find_member("Mid#bump");
    const auto label = *h.facts.model.find_member("Mid.label");
    const std::vector<RefactoringOp> ops = {
        RefactoringOp::with_member(RefactoringKind::MoveMethod, h.mid, h.helper, bump),
        RefactoringOp::with_member(RefactoringKind::PullUpMethod, h.mid, h.base, bump),
        RefactoringOp::with_member(RefactoringKind::PushDownField, h.mid, h.leaf, label),
        RefactoringOp::with_member(RefactoringKind::PullUpField, h.mid, h.base, label),
    };
    for (const auto& op : ops) {
        auto inv = inverse(op);
        REQUIRE(inv);
        auto s = apply_sequence(Solution{{op, *inv}}, h.facts.model);
        CHECK(s.effective.size() == 2);
        CHECK(s.model == h.facts.model);
    }
    CHECK_FALSE(inverse(RefactoringOp::inline_class(h.mid, h.helper)));
    CHECK_FALSE(inverse(RefactoringOp::null()));
}

TEST_CASE("ops serialize by id and read back") {
    Glide g;
    auto op = RefactoringOp::with_member(RefactoringKind::MoveMethod, g.active, g.weak, g.cleanup);
    auto j = to_json(op, g.facts.model);
    CHECK(j["kind"] == "MoveMethod");
    CHECK(j["class1"] == "ActiveResources");
    CHECK(j["member"] == "ActiveResources#cleanupActiveReference");
    CHECK(op_from_json(j, g.facts.model) == op);
    CHECK(op_from_json(to_json(RefactoringOp::null(), g.facts.model), g.facts.model) == RefactoringOp::null());
    CHECK(describe(op, g.facts.model) ==
          "MoveMethod(ActiveResources, ResourceWeakReference, ActiveResources#cleanupActiveReference)");

    j["class2"] = "Nope";
    CHECK_THROWS_AS(op_from_json(j, g.facts.model), UnknownIdError);
    CHECK_THROWS_AS(op_from_json(nlohmann::json{{"kind", "Rename"}}, g.facts.model), ParseError);
}

}
