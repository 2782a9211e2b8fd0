#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refrev/review.hpp"
#include "refrev/search.hpp"
#include "refrev/semantics.hpp"

namespace refrev {

/// Which front members count as refactoring candidates.
enum class QualFilter : std::uint8_t { NonNegative, Positive };

std::string_view to_string(QualFilter f);
/// "nonneg" or "positive". Throws ConfigError.
QualFilter parse_qual_filter(std::string_view text);
bool passes(QualFilter f, double qual);

struct InputPaths {
    std::filesystem::path facts;
    std::filesystem::path commits;
    std::filesystem::path activity;
    std::optional<std::filesystem::path> aliases;
};

/// Throws InputError subclasses naming the failing path.
Problem load_problem(const InputPaths& inputs, const ReviewParams& review = {}, const SemanticParams& semantics = {});

struct ExperimentPlan {
    /// Either input files or the name of a built-in fixture.
    InputPaths inputs;
    std::string fixture;
    std::vector<Algorithm> algorithms;
    std::size_t repeats = 5;
    std::uint64_t base_seed = 1;
    QualFilter qual_filter = QualFilter::NonNegative;
    std::filesystem::path output_dir = "experiment";
    /// Also run every cell without the review objective.
    bool ablation = false;
    /// Shared settings; algorithm, seed and mode are set per run.
    SearchConfig search;
    ReviewParams review;
    SemanticParams semantics;

    /// Throws ConfigError.
    void validate() const;
};

/// Relative paths inside the plan resolve against `base_dir`. Unknown keys
/// and malformed values throw ConfigError.
ExperimentPlan parse_plan(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// Problem described by the plan's inputs or fixture name.
Problem plan_problem(const ExperimentPlan& plan);

struct Summary {
    std::size_t count = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

/// Quartiles by linear interpolation between order statistics. Empty input
/// gives nullopt.
std::optional<Summary> summarize(std::vector<double> values);

/// Fraction of solutions with positive RA; nullopt for no solutions.
std::optional<double> reviewable_ratio(std::span<const Individual> solutions);

struct RunRecord {
    Algorithm algorithm = Algorithm::Nsga2;
    ObjectiveMode mode = ObjectiveMode::WithReview;
    std::uint64_t seed = 0;
    std::size_t evaluations = 0;
    std::size_t front_size = 0;
    /// Against (-0.1, -0.1, -0.1) on the objectives the run optimized.
    double hypervolume = 0;
    /// Front members that pass the qualification filter.
    std::vector<Individual> solutions;
};

struct CellSummary {
    Algorithm algorithm = Algorithm::Nsga2;
    ObjectiveMode mode = ObjectiveMode::WithReview;
    std::size_t runs = 0;
    std::size_t solutions = 0;
    std::optional<Summary> qual, sem, ra, hypervolume;
    std::optional<double> reviewable_ratio;
};

struct ExperimentReport {
    std::vector<RunRecord> runs;
    /// One per (mode, algorithm) in plan order.
    std::vector<CellSummary> cells;
};

/// Runs every algorithm `repeats` times with seeds base_seed + r, in `mode`.
ExperimentReport run_experiment(const Problem& problem, const ExperimentPlan& plan,
                                ObjectiveMode mode = ObjectiveMode::WithReview);

struct AblationRow {
    Algorithm algorithm = Algorithm::Nsga2;
    std::optional<double> ratio_with, ratio_without;
    std::optional<double> mean_ra_with, mean_ra_without;
    /// Mean RA with the review objective as a percentage of the mean without it.
    std::optional<double> ra_percent_of_without;
};

struct AblationReport {
    ExperimentReport with_review;
    ExperimentReport without_review;
    std::vector<AblationRow> rows;
};

/// Runs the plan in both objective modes and pairs the results.
AblationReport ablation_compare(const Problem& problem, const ExperimentPlan& plan);

nlohmann::json to_json(const ExperimentReport& report, const ExperimentPlan& plan);
nlohmann::json to_json(const AblationReport& report, const ExperimentPlan& plan);

std::string distributions_csv(std::span<const ExperimentReport* const> reports);
/// Box statistics with Tukey whiskers; values beyond 1.5 IQR are left out.
std::string boxplot_csv(std::span<const ExperimentReport* const> reports);
std::string reviewable_ratio_csv(std::span<const ExperimentReport* const> reports);
/// One row per qualified solution: mode, algorithm, seed, `x` and RA.
std::string scatter_csv(std::span<const ExperimentReport* const> reports, bool sem_axis);

struct ExperimentOutput {
    ExperimentReport report;
    std::optional<AblationReport> ablation;
    std::vector<std::filesystem::path> files;
};

/// Runs the plan and writes report.json, distributions.csv, boxplot.csv, the
/// two scatter tables and reviewable_ratio.csv; ablation plans add
/// ablation.json and both modes to the tables.
ExperimentOutput write_experiment(const ExperimentPlan& plan);

} // namespace refrev
