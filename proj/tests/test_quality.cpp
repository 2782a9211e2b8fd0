#include <doctest.h>

#include <cmath>

#include <refrev/fixtures.hpp>
#include <refrev/quality.hpp>

#include "sample.hpp"

using namespace refrev;
using nlohmann::json;

namespace {

CodeFacts facts_of(const char* text) { return parse_code_facts(json::parse(text)); }

DesignMetrics random_metrics(Rng& rng) {
    std::array<double, 11> a{};
    for (auto& x : a) x = rng.unit() * 20.0 - 5.0;
    return DesignMetrics::from_array(a);
}

} // namespace

TEST_SUITE("quality") {

TEST_CASE("a class with only private fields is fully encapsulated") {
    auto f = facts_of(R"({"classes": [{"id": "Vault", "file": "Vault.java", "fields": [
        {"id": "Vault.a", "name": "a", "type": "int", "visibility": "private"},
        {"id": "Vault.b", "name": "b", "type": "int", "visibility": "private"}]}]})");
    CHECK(compute_metrics(f.model, f.graph).dam == 1.0);
}

TEST_CASE("unrelated classes have no hierarchies or ancestors") {
    auto f = facts_of(R"({"classes": [{"id": "A", "file": "A.java"}, {"id": "B", "file": "B.java"}]})");
    auto m = compute_metrics(f.model, f.graph);
    CHECK(m.dsc == 2);
    CHECK(m.noh == 0);
    CHECK(m.ana == 0);
}

TEST_CASE("one coupled pair among three classes averages to a third") {
    auto f = facts_of(R"({"classes": [
        {"id": "A", "file": "A.java", "methods": [{"id": "A#go", "name": "go"}]},
        {"id": "B", "file": "B.java", "methods": [{"id": "B#run", "name": "run"}]},
        {"id": "C", "file": "C.java"}],
      "edges": [{"from": "A#go", "to": "B#run", "kind": "invoke"}]})");
    CHECK(compute_metrics(f.model, f.graph).dcc == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("metric census of the four-class hierarchy") {
    auto f = parse_code_facts(sample::hierarchy_facts());
    auto m = compute_metrics(f.model, f.graph);
    // Counted by hand from the fixture declaration.
    CHECK(m.dsc == 4);
    CHECK(m.noh == 1);
    CHECK(m.ana == 0.75);
    CHECK(m.dam == 0.25);
    CHECK(m.dcc == 0.25);
    CHECK(m.cam == 0.75);
    CHECK(m.moa == 0);
    CHECK(m.mfa == doctest::Approx(7.0 / 24.0).epsilon(1e-15));
    CHECK(m.nop == 0);
    CHECK(m.cis == 1);
    CHECK(m.nom == 1);

    // The six linear forms evaluated separately on the census above.
    auto q = compute_attributes(m);
    CHECK(q.reusability == doctest::Approx(2.625).epsilon(1e-12));
    CHECK(q.flexibility == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.understandability == doctest::Approx(-1.65).epsilon(1e-12));
    CHECK(q.functionality == doctest::Approx(1.41).epsilon(1e-12));
    CHECK(q.extendibility == doctest::Approx(0.39583333333333337).epsilon(1e-12));
    CHECK(q.effectiveness == doctest::Approx(0.25833333333333336).epsilon(1e-12));
}

TEST_CASE("attributes are linear in the metrics") {
    CHECK(compute_attributes(DesignMetrics{}) == QualityVector{});
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        auto m = random_metrics(rng);
        auto doubled = m.as_array();
        for (auto& x : doubled) x *= 2;
        auto q = compute_attributes(m).as_array();
        auto q2 = compute_attributes(DesignMetrics::from_array(doubled)).as_array();
        for (std::size_t k = 0; k < 6; ++k) CHECK(q2[k] == doctest::Approx(2 * q[k]).epsilon(1e-12));
    }
}

TEST_CASE("per-class ratios stay in the unit interval") {
    auto bundle = micro_fixture();
    auto f = parse_code_facts(bundle.facts);
    auto m = compute_metrics(f.model, f.graph);
    for (double x : m.as_array()) CHECK(x >= 0);
    CHECK(m.dam <= 1);
    CHECK(m.cam <= 1);
    CHECK(m.mfa <= 1);
}

TEST_CASE("quality gain of the identity and of undone moves is zero") {
    auto f = parse_code_facts(sample::hierarchy_facts());
    CHECK(quality_gain(f.model, f.graph, Solution{std::vector<RefactoringOp>(5, RefactoringOp::null())}) == 0.0);

    const auto mid = *f.model.find_class("Mid"), helper = *f.model.find_class("Helper");
    auto op = RefactoringOp::with_member(RefactoringKind::MoveMethod, mid, helper, *f.model.find_member("Mid#bump"));
    CHECK(quality_gain(f.model, f.graph, Solution{{op}}) != 0.0);
    CHECK(std::abs(quality_gain(f.model, f.graph, Solution{{op, *inverse(op)}})) <= 1e-12);
}

TEST_CASE("single moves on the micro fixture change quality by small amounts") {
    auto f = parse_code_facts(micro_fixture().facts);
    const auto classes = f.model.internal_classes();
    double largest = 0;
    int applied = 0;
    for (std::uint32_t i = 0; i < f.model.member_count(); ++i) {
        const MemberId m{i};
        const auto& d = f.model.member_decl(m);
        if (d.kind != MemberKind::Method) continue;
        for (auto target : classes) {
            auto op = RefactoringOp::with_member(RefactoringKind::MoveMethod, f.model.owner(m), target, m);
            if (!is_applicable(op, f.model)) continue;
            ++applied;
            largest = std::max(largest, std::abs(quality_gain(f.model, f.graph, Solution{{op}})));
        }
    }
    CHECK(applied > 100);
    CHECK(largest < 0.2);
}

}
