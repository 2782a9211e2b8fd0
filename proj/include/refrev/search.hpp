#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refrev/code_model.hpp"
#include "refrev/moea.hpp"
#include "refrev/quality.hpp"
#include "refrev/random.hpp"
#include "refrev/refactoring.hpp"
#include "refrev/review.hpp"
#include "refrev/semantics.hpp"

namespace refrev {

struct FitnessVector {
    double qual = 0;
    double sem = 0;
    double ra = 0;

    Point as_point() const { return {qual, sem, ra}; }
    bool operator==(const FitnessVector&) const = default;
};

enum class Algorithm : std::uint8_t { Nsga2, Spea2, Ibea, MoCell, RandomSearch };

std::string_view to_string(Algorithm a);
/// Accepts the canonical names plus "random". Throws ConfigError.
Algorithm parse_algorithm(std::string_view text);

/// Which objectives drive selection. WithoutReview optimizes quality and
/// semantics only; the reviewer score is still computed for reporting.
enum class ObjectiveMode : std::uint8_t { WithReview, WithoutReview };

std::string_view to_string(ObjectiveMode m);

inline std::size_t objective_count(ObjectiveMode m) { return m == ObjectiveMode::WithReview ? 3 : 2; }

struct SearchConfig {
    Algorithm algorithm = Algorithm::Nsga2;
    ObjectiveMode mode = ObjectiveMode::WithReview;
    std::size_t population_size = 100;
    double crossover_probability = 0.9;
    double mutation_probability = 0.05;
    std::size_t max_sequence_length = 5;
    /// Evaluation budget; unset means 100 per internal class.
    std::optional<std::size_t> max_evaluations;
    std::uint64_t seed = 1;
    double ibea_kappa = 0.05;
    /// Cells replaced from the archive after every MOCell sweep.
    std::size_t mocell_feedback = 20;
    std::size_t threads = 1;

    /// Throws ConfigError.
    void validate() const;
};

inline std::size_t default_max_evaluations(std::size_t internal_classes) { return 100 * internal_classes; }

/// Parameter domains drawn from the original model: internal classes and the
/// members each of them owns.
class GenomeSpace {
public:
    GenomeSpace() = default;
    explicit GenomeSpace(const CodeModel& model);

    bool empty() const { return classes_.empty(); }
    std::span<const ClassId> classes() const { return classes_; }
    /// Members of `kind` owned by `c`, or every member of that kind when `c`
    /// owns none.
    std::span<const MemberId> member_choices(ClassId c, MemberKind kind) const;
    std::span<const MemberId> all_members(MemberKind kind) const;

private:
    std::vector<ClassId> classes_;
    std::vector<std::vector<MemberId>> fields_, methods_;  // indexed by class id
    std::vector<MemberId> all_fields_, all_methods_;
};

/// One uniformly drawn gene. Kind Null ends parameter drawing; kinds whose
/// member table is empty in the whole model become Null.
RefactoringOp random_op(const GenomeSpace& space, RandomSource& rng);
Solution random_solution(const GenomeSpace& space, std::size_t length, RandomSource& rng);

/// One-point crossover: the first `cut` genes of each parent are kept and
/// the tails swapped.
std::pair<Solution, Solution> crossover_at(const Solution& a, const Solution& b, std::size_t cut);
/// Cut drawn uniformly from 1..L-1; parents of length < 2 are copied.
std::pair<Solution, Solution> crossover(const Solution& a, const Solution& b, RandomSource& rng);

enum class MutationEdit : std::uint8_t { ReplaceKind, RedrawSource, RedrawTarget, RedrawMember };

/// Edits that make sense for a gene of this kind, in a fixed order.
std::vector<MutationEdit> available_edits(RefactoringKind kind);
RefactoringOp apply_edit(const RefactoringOp& op, MutationEdit edit, const GenomeSpace& space, RandomSource& rng);
/// Each gene independently mutates with `probability`, by one edit chosen
/// uniformly from its available edits.
Solution mutate(const Solution& s, const GenomeSpace& space, double probability, RandomSource& rng);

struct Evaluation {
    FitnessVector fitness;
    std::vector<std::string> reviewers;
    std::vector<RefactoringOp> effective;
    std::vector<double> per_op_scs;
    QualityVector quality_after;
};

/// Everything needed to score a solution. Evaluation is pure and safe to run
/// from several threads at once.
class Problem {
public:
    Problem(CodeModel model, CallGraph graph, ReviewerIndex reviewers, SemanticParams semantics = {});

    const CodeModel& model() const { return model_; }
    const CallGraph& graph() const { return graph_; }
    const ReviewerIndex& reviewers() const { return reviewers_; }
    const SemanticIndex& semantic_index() const { return semantic_index_; }
    const SemanticParams& semantic_params() const { return semantic_params_; }
    const GenomeSpace& genome_space() const { return space_; }
    const QualityVector& baseline_quality() const { return baseline_; }
    std::size_t internal_class_count() const { return space_.classes().size(); }

    Evaluation evaluate(const Solution& s) const;

private:
    CodeModel model_;
    CallGraph graph_;
    ReviewerIndex reviewers_;
    SemanticParams semantic_params_;
    SemanticIndex semantic_index_;
    GenomeSpace space_;
    QualityVector baseline_;
    std::vector<std::uint32_t> path_of_class_;
    std::vector<std::optional<std::uint32_t>> review_file_of_class_;
};

struct Individual {
    Solution solution;
    FitnessVector fitness;
    std::vector<std::string> reviewers;
    std::vector<RefactoringOp> effective;
    std::vector<double> per_op_scs;
    QualityVector quality_after;
};

/// Counts evaluations against a fixed budget.
class Evaluator {
public:
    Evaluator(const Problem& problem, std::size_t budget, std::size_t threads = 1);

    std::size_t used() const { return used_; }
    std::size_t remaining() const { return budget_ - used_; }

    /// Fills in the evaluation of each individual. Throws std::logic_error
    /// when the batch exceeds the remaining budget.
    void evaluate(std::span<Individual> batch);
    Individual evaluate(Solution s);

private:
    const Problem& problem_;
    std::size_t budget_;
    std::size_t threads_;
    std::size_t used_ = 0;
};

struct Provenance {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::size_t evaluations = 0;
    ObjectiveMode mode = ObjectiveMode::WithReview;
};

struct ParetoFront {
    std::vector<Individual> solutions;
    Provenance provenance;
};

/// Runs the configured algorithm until the budget is spent. The returned front
/// holds distinct effective sequences, non-dominated under the configured
/// objectives, ordered by descending (qual, sem, ra).
ParetoFront run_search(const Problem& problem, const SearchConfig& config);

/// Non-dominated, duplicate-free, deterministically ordered subset.
std::vector<Individual> final_front(std::vector<Individual> candidates, ObjectiveMode mode);

std::vector<Point> objective_points(std::span<const Individual> population, ObjectiveMode mode);

nlohmann::json to_json(const Individual& ind, const Problem& problem, const QualityVector& before);
nlohmann::json to_json(const ParetoFront& front, const Problem& problem);
/// One row per solution: index, qual, sem, ra, effective op count, reviewers, ops.
std::string to_csv(const ParetoFront& front, const Problem& problem);
/// Reads back the genes of a saved front. Throws ParseError.
std::vector<Solution> solutions_from_json(const nlohmann::json& doc, const CodeModel& model);

} // namespace refrev
