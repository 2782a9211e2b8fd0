#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <refrev/code_model.hpp>
#include <refrev/random.hpp>
#include <refrev/review.hpp>

#include "oracles.hpp"

namespace sample {

std::filesystem::path data_dir();
std::filesystem::path glide_dir();

/// Fresh scratch directory under the system temp dir, emptied on creation.
std::filesystem::path scratch_dir(const std::string& name);

/// Base <- Mid <- Leaf chain plus a standalone Helper. Leaf invokes a Helper
/// method; Mid owns two private fields.
nlohmann::json hierarchy_facts();

struct ReviewCase {
    oracle::History history;
    std::map<std::string, int> loc;
    std::size_t op_count = 1;
};

/// Up to 15 developers, up to 6 files, random commits and activity.
ReviewCase random_review_case(refrev::Rng& rng);

std::vector<refrev::CommitRecord> commit_records(const oracle::History& h);
std::vector<refrev::ActivityRecord> activity_records(const oracle::History& h);
refrev::ReviewParams review_params(const oracle::History& h, int max_reviewers = 2);

} // namespace sample
