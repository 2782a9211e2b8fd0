#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refrev/review.hpp"
#include "refrev/search.hpp"

namespace refrev {

/// Synthetic project: code facts plus scripted commit and activity history.
struct FixtureBundle {
    nlohmann::json facts;
    std::vector<CommitRecord> commits;
    std::vector<ActivityRecord> activities;
};

/// Forty classes in eight packages with small hierarchies and planted
/// feature-envy methods, both within and across packages.
FixtureBundle micro_fixture();

/// Two halves of envy pairs. Every expert on the first half is over the
/// workload cutoff; the second half has free experts but offers weaker and
/// less coherent refactorings.
FixtureBundle busy_experts_fixture();

/// One always-available developer has committed to every file.
FixtureBundle common_reviewer_fixture();

/// Fixture by name: "micro", "busy-experts" or "common-reviewer".
FixtureBundle fixture_by_name(std::string_view name);

/// Writes facts.json, commits.jsonl and activity.json into `dir`.
void write_fixture(const FixtureBundle& bundle, const std::filesystem::path& dir);

Problem make_problem(const FixtureBundle& bundle, const ReviewParams& review = {},
                     const SemanticParams& semantics = {});

} // namespace refrev
