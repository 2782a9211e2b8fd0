#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "refrev/code_model.hpp"
#include "refrev/refactoring.hpp"

namespace refrev {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;
inline constexpr Timestamp kSecondsPerDay = 86'400;

/// Accepts integer seconds or an ISO-8601 UTC string (`2023-03-08`,
/// `2023-03-08T12:00:00Z`). Throws ParseError.
Timestamp parse_timestamp(const nlohmann::json& value);
Timestamp parse_timestamp(std::string_view text);

struct CommitRecord {
    std::string sha;
    std::string author;
    Timestamp timestamp = 0;
    std::vector<std::string> files;
};

enum class ActivityKind : std::uint8_t { PullRequest, Issue };

struct ActivityEvent {
    std::string actor;
    Timestamp timestamp = 0;
};

struct ActivityRecord {
    std::string id;
    ActivityKind kind = ActivityKind::PullRequest;
    /// The first event is the proposal.
    std::vector<ActivityEvent> events;
};

struct TimeWindow {
    Timestamp start = 0;
    Timestamp end = 0;
};

struct ReviewParams {
    int commit_cap = 10;
    int workload_cutoff = 2;
    /// Unset means seven days ending at the latest recorded activity.
    std::optional<TimeWindow> window;
    int max_reviewers = 2;
    /// Literal reading: every reviewer individually needs expertise on every
    /// touched file. Default is joint coverage by the group.
    bool strict_coverage = false;

    /// Throws ConfigError.
    void validate() const;
};

/// Maps developer aliases to one canonical id.
class AliasMap {
public:
    AliasMap() = default;
    /// `{"canonical": ["alias", ...], ...}`. Throws ParseError.
    static AliasMap from_json(const nlohmann::json& doc);

    const std::string& canonical(const std::string& name) const;
    std::size_t size() const { return to_canonical_.size(); }

private:
    std::unordered_map<std::string, std::string> to_canonical_;
};

AliasMap load_aliases(const std::filesystem::path& path);

/// One JSON object per line. Blank lines are skipped.
std::vector<CommitRecord> parse_commits(std::istream& in, const AliasMap& aliases = {});
std::vector<CommitRecord> load_commits(const std::filesystem::path& path, const AliasMap& aliases = {});

/// JSON array of activity records.
std::vector<ActivityRecord> parse_activities(const nlohmann::json& doc, const AliasMap& aliases = {});
std::vector<ActivityRecord> load_activities(const std::filesystem::path& path, const AliasMap& aliases = {});

/// Relative position of a commit between the repository's first and latest
/// commits; 1.0 when both coincide. Throws std::out_of_range outside the span.
double recency(Timestamp t, Timestamp repo_first, Timestamp repo_last);

/// Recency-weighted share of the commits on `file` made by `developer`,
/// with the denominator capped at `commit_cap` and the result capped at 1.
double expertise(std::string_view developer, std::string_view file, std::span<const CommitRecord> commits,
                 int commit_cap);

/// Distinct pull requests plus distinct issues with any event by `developer`
/// inside the closed window.
int workload(std::string_view developer, std::span<const ActivityRecord> activities, TimeWindow window);

/// Seven days ending at the latest activity event (or latest commit when there
/// is no activity).
TimeWindow default_window(std::span<const CommitRecord> commits, std::span<const ActivityRecord> activities);

struct DeveloperProfile {
    std::string id;
    std::map<std::string, double> expertise;
    int workload = 0;
};

/// Developer profiles and a per-file expert list, built in one pass over the
/// histories. Immutable afterwards and safe to share between evaluators.
class ReviewerIndex {
public:
    struct Expert {
        std::uint32_t developer;
        double expertise;
    };

    ReviewerIndex() = default;
    ReviewerIndex(std::span<const CommitRecord> commits, std::span<const ActivityRecord> activities,
                  const ReviewParams& params);

    const ReviewParams& params() const { return params_; }
    TimeWindow window() const { return window_; }
    /// Sorted by developer id.
    const std::vector<DeveloperProfile>& profiles() const { return profiles_; }
    std::optional<std::uint32_t> developer(std::string_view id) const;
    std::optional<std::uint32_t> file_id(std::string_view path) const;
    /// Developers with positive expertise on the file, by developer index.
    std::span<const Expert> experts(std::uint32_t file) const { return experts_[file]; }
    double expertise_of(std::uint32_t developer, std::uint32_t file) const;
    bool available(std::uint32_t developer) const {
        return profiles_[developer].workload <= params_.workload_cutoff;
    }

private:
    ReviewParams params_;
    TimeWindow window_;
    std::vector<DeveloperProfile> profiles_;
    std::unordered_map<std::string, std::uint32_t> developer_index_;
    std::unordered_map<std::string, std::uint32_t> file_index_;
    std::vector<std::vector<Expert>> experts_;
};

/// Touched files with multiplicity: each effective op contributes the
/// distinct files of its two parameter classes.
using FileMultiset = std::map<std::string, int>;
FileMultiset loc_of(std::span<const RefactoringOp> effective, const CodeModel& model);

struct ReviewerRecommendation {
    double ra = 0;
    /// Sorted developer ids; empty means unreviewable.
    std::vector<std::string> group;

    bool reviewable() const { return !group.empty(); }
};

/// A touched file by index into the reviewer index (nullopt when no commit
/// ever touched it) with its multiplicity.
struct TouchedFile {
    std::optional<std::uint32_t> file;
    int count = 0;
};

/// Best group of at most `max_reviewers` available developers that jointly
/// covers every touched file. Score is the group's expertise mass over the
/// multiset divided by `op_count`. Ties go to the smaller group, then to the
/// lexicographically smaller id list.
ReviewerRecommendation recommend_reviewers(std::span<const TouchedFile> loc, std::size_t op_count,
                                           const ReviewerIndex& index);
ReviewerRecommendation recommend_reviewers(const FileMultiset& loc, std::size_t op_count,
                                           const ReviewerIndex& index);
ReviewerRecommendation recommend_reviewers(std::span<const RefactoringOp> effective, const CodeModel& model,
                                           const ReviewerIndex& index);

nlohmann::json to_json(const DeveloperProfile& profile);
nlohmann::json to_json(const CommitRecord& commit);
nlohmann::json to_json(const ActivityRecord& activity);

} // namespace refrev
