#include "refrev/search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "refrev/errors.hpp"
#include "refrev/text.hpp"

namespace refrev {

using nlohmann::json;

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Nsga2: return "nsga2";
    case Algorithm::Spea2: return "spea2";
    case Algorithm::Ibea: return "ibea";
    case Algorithm::MoCell: return "mocell";
    case Algorithm::RandomSearch: return "random_search";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    for (auto a : {Algorithm::Nsga2, Algorithm::Spea2, Algorithm::Ibea, Algorithm::MoCell, Algorithm::RandomSearch}) {
        if (text == to_string(a)) return a;
    }
    if (text == "random" || text == "rs") return Algorithm::RandomSearch;
    if (text == "nsga-ii" || text == "nsgaii") return Algorithm::Nsga2;
    throw ConfigError("unknown algorithm '" + std::string(text) + "'");
}

std::string_view to_string(ObjectiveMode m) {
    return m == ObjectiveMode::WithReview ? "qual+sem+ra" : "qual+sem";
}

void SearchConfig::validate() const {
    auto probability = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
    };
    probability(crossover_probability, "crossover probability");
    probability(mutation_probability, "mutation probability");
    if (population_size < 2 || population_size % 2 != 0) {
        throw ConfigError("population size must be even and at least 2");
    }
    if (max_sequence_length < 1 || max_sequence_length > 32) {
        throw ConfigError("maximum sequence length must be in [1, 32]");
    }
    if (max_evaluations && *max_evaluations < population_size) {
        throw ConfigError("maximum evaluations (" + std::to_string(*max_evaluations) +
                          ") must be at least the population size (" + std::to_string(population_size) + ")");
    }
    if (!(ibea_kappa > 0.0)) throw ConfigError("IBEA kappa must be positive");
    if (threads < 1) throw ConfigError("thread count must be at least 1");
}

// ---------------------------------------------------------------------------
// Genome space and variation

GenomeSpace::GenomeSpace(const CodeModel& model) {
    classes_ = model.internal_classes();
    fields_.resize(model.class_count());
    methods_.resize(model.class_count());
    for (std::uint32_t i = 0; i < model.member_count(); ++i) {
        const MemberId m{i};
        const auto owner = model.owner(m);
        if (!model.is_internal(owner)) continue;
        const auto& decl = model.member_decl(m);
        if (decl.kind == MemberKind::Field) {
            fields_[owner.value].push_back(m);
            all_fields_.push_back(m);
        } else if (!decl.is_constructor) {
            methods_[owner.value].push_back(m);
            all_methods_.push_back(m);
        }
    }
}

std::span<const MemberId> GenomeSpace::all_members(MemberKind kind) const {
    return kind == MemberKind::Field ? all_fields_ : all_methods_;
}

std::span<const MemberId> GenomeSpace::member_choices(ClassId c, MemberKind kind) const {
    const auto& own = kind == MemberKind::Field ? fields_[c.value] : methods_[c.value];
    if (!own.empty()) return own;
    return all_members(kind);
}

namespace {

ClassId draw_class(const GenomeSpace& space, RandomSource& rng) {
    auto classes = space.classes();
    return classes[rng.index(classes.size())];
}

/// Fills in parameters for `kind`; Null when the model cannot supply them.
RefactoringOp draw_params(RefactoringKind kind, const GenomeSpace& space, RandomSource& rng) {
    if (kind == RefactoringKind::Null || space.empty()) return RefactoringOp::null();
    const auto mk = member_kind_of(kind);
    if (mk && space.all_members(*mk).empty()) return RefactoringOp::null();
    RefactoringOp op{kind, draw_class(space, rng), draw_class(space, rng), std::nullopt};
    if (mk) {
        auto choices = space.member_choices(op.source, *mk);
        op.member = choices[rng.index(choices.size())];
    }
    return op;
}

} // namespace

RefactoringOp random_op(const GenomeSpace& space, RandomSource& rng) {
    const auto kind = kAllRefactoringKinds[rng.index(kAllRefactoringKinds.size())];
    return draw_params(kind, space, rng);
}

Solution random_solution(const GenomeSpace& space, std::size_t length, RandomSource& rng) {
    Solution s;
    s.genes.reserve(length);
    for (std::size_t i = 0; i < length; ++i) s.genes.push_back(random_op(space, rng));
    return s;
}

std::pair<Solution, Solution> crossover_at(const Solution& a, const Solution& b, std::size_t cut) {
    if (a.genes.size() != b.genes.size()) throw std::invalid_argument("crossover: parents differ in length");
    cut = std::min(cut, a.genes.size());
    Solution c1, c2;
    c1.genes.assign(a.genes.begin(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    c1.genes.insert(c1.genes.end(), b.genes.begin() + static_cast<std::ptrdiff_t>(cut), b.genes.end());
    c2.genes.assign(b.genes.begin(), b.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    c2.genes.insert(c2.genes.end(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut), a.genes.end());
    return {std::move(c1), std::move(c2)};
}

std::pair<Solution, Solution> crossover(const Solution& a, const Solution& b, RandomSource& rng) {
    const auto n = a.genes.size();
    if (n < 2) return {a, b};
    return crossover_at(a, b, 1 + rng.index(n - 1));
}

std::vector<MutationEdit> available_edits(RefactoringKind kind) {
    switch (kind) {
    case RefactoringKind::Null: return {MutationEdit::ReplaceKind};
    case RefactoringKind::InlineClass:
        return {MutationEdit::ReplaceKind, MutationEdit::RedrawSource, MutationEdit::RedrawTarget};
    default:
        return {MutationEdit::ReplaceKind, MutationEdit::RedrawSource, MutationEdit::RedrawTarget,
                MutationEdit::RedrawMember};
    }
}

RefactoringOp apply_edit(const RefactoringOp& op, MutationEdit edit, const GenomeSpace& space, RandomSource& rng) {
    RefactoringOp out = op;
    switch (edit) {
    case MutationEdit::ReplaceKind: {
        std::vector<RefactoringKind> others;
        for (auto k : kAllRefactoringKinds) {
            if (k != op.kind) others.push_back(k);
        }
        return draw_params(others[rng.index(others.size())], space, rng);
    }
    case MutationEdit::RedrawSource:
        if (op.kind != RefactoringKind::Null && !space.empty()) out.source = draw_class(space, rng);
        break;
    case MutationEdit::RedrawTarget:
        if (op.kind != RefactoringKind::Null && !space.empty()) out.target = draw_class(space, rng);
        break;
    case MutationEdit::RedrawMember:
        if (auto mk = member_kind_of(op.kind)) {
            auto choices = space.member_choices(op.source, *mk);
            if (!choices.empty()) out.member = choices[rng.index(choices.size())];
        }
        break;
    }
    return out;
}

Solution mutate(const Solution& s, const GenomeSpace& space, double probability, RandomSource& rng) {
    Solution out;
    out.genes.reserve(s.genes.size());
    for (const auto& gene : s.genes) {
        if (probability > 0 && rng.chance(probability)) {
            const auto edits = available_edits(gene.kind);
            out.genes.push_back(apply_edit(gene, edits[rng.index(edits.size())], space, rng));
        } else {
            out.genes.push_back(gene);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Problem::Problem(CodeModel model, CallGraph graph, ReviewerIndex reviewers, SemanticParams semantics)
    : model_(std::move(model)),
      graph_(std::move(graph)),
      reviewers_(std::move(reviewers)),
      semantic_params_(semantics),
      semantic_index_(model_, graph_),
      space_(model_),
      baseline_(compute_attributes(compute_metrics(model_, graph_))) {
    if (!(semantic_params_.alpha >= 0.0 && semantic_params_.alpha <= 1.0)) {
        throw ConfigError("alpha must be in [0, 1]");
    }
    std::unordered_map<std::string, std::uint32_t> paths;
    path_of_class_.resize(model_.class_count());
    review_file_of_class_.resize(model_.class_count());
    for (std::uint32_t i = 0; i < model_.class_count(); ++i) {
        const auto& file = model_.class_decl(ClassId{i}).file;
        path_of_class_[i] = paths.try_emplace(file, static_cast<std::uint32_t>(paths.size())).first->second;
        review_file_of_class_[i] = reviewers_.file_id(file);
    }
}

Evaluation Problem::evaluate(const Solution& s) const {
    Evaluation out;
    auto applied = apply_sequence(s, model_);
    out.effective = std::move(applied.effective);
    if (out.effective.empty()) {
        out.quality_after = baseline_;
        return out;
    }
    out.quality_after = compute_attributes(compute_metrics(applied.model, graph_));
    out.fitness.qual = quality_delta(baseline_, out.quality_after);

    auto sem = sem_of_sequence(out.effective, semantic_index_, semantic_params_);
    out.fitness.sem = sem.sem;
    out.per_op_scs = std::move(sem.per_op_scs);

    std::vector<TouchedFile> touched;
    touched.reserve(out.effective.size() * 2);
    for (const auto& op : out.effective) {
        touched.push_back({review_file_of_class_[op.source.value], 1});
        if (path_of_class_[op.target.value] != path_of_class_[op.source.value]) {
            touched.push_back({review_file_of_class_[op.target.value], 1});
        }
    }
    auto rec = recommend_reviewers(std::span<const TouchedFile>(touched), out.effective.size(), reviewers_);
    out.fitness.ra = rec.ra;
    out.reviewers = std::move(rec.group);
    return out;
}

Evaluator::Evaluator(const Problem& problem, std::size_t budget, std::size_t threads)
    : problem_(problem), budget_(budget), threads_(std::max<std::size_t>(threads, 1)) {}

namespace {

void fill(Individual& ind, Evaluation&& e) {
    ind.solution.effective_count = e.effective.size();
    ind.fitness = e.fitness;
    ind.reviewers = std::move(e.reviewers);
    ind.effective = std::move(e.effective);
    ind.per_op_scs = std::move(e.per_op_scs);
    ind.quality_after = e.quality_after;
}

} // namespace

void Evaluator::evaluate(std::span<Individual> batch) {
    if (batch.size() > remaining()) throw std::logic_error("evaluation budget exceeded");
    used_ += batch.size();
    const std::size_t workers = std::min(threads_, batch.size());
    if (workers <= 1) {
        for (auto& ind : batch) fill(ind, problem_.evaluate(ind.solution));
        return;
    }
    // Each worker writes only its own slots, so the result is independent of scheduling.
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < batch.size(); i += workers) {
                fill(batch[i], problem_.evaluate(batch[i].solution));
            }
        });
    }
    for (auto& t : pool) t.join();
}

Individual Evaluator::evaluate(Solution s) {
    Individual ind;
    ind.solution = std::move(s);
    evaluate(std::span<Individual>(&ind, 1));
    return ind;
}

// ---------------------------------------------------------------------------
// Fronts

std::vector<Point> objective_points(std::span<const Individual> population, ObjectiveMode mode) {
    std::vector<Point> pts;
    pts.reserve(population.size());
    for (const auto& ind : population) {
        auto p = ind.fitness.as_point();
        if (mode == ObjectiveMode::WithoutReview) p[2] = 0;
        pts.push_back(p);
    }
    return pts;
}

namespace {

auto op_key(const RefactoringOp& op) {
    return std::tuple(static_cast<int>(op.kind), op.source.value, op.target.value,
                      op.member ? static_cast<std::int64_t>(op.member->value) : -1);
}

bool ops_less(const std::vector<RefactoringOp>& a, const std::vector<RefactoringOp>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const auto& x, const auto& y) { return op_key(x) < op_key(y); });
}

bool genes_less(const Solution& a, const Solution& b) { return ops_less(a.genes, b.genes); }

} // namespace

std::vector<Individual> final_front(std::vector<Individual> candidates, ObjectiveMode mode) {
    const auto pts = objective_points(candidates, mode);
    const auto keep = nondominated_indices(pts, objective_count(mode));
    std::vector<Individual> front;
    front.reserve(keep.size());
    for (auto i : keep) front.push_back(std::move(candidates[i]));
    std::sort(front.begin(), front.end(), [](const Individual& a, const Individual& b) {
        if (a.fitness.qual != b.fitness.qual) return a.fitness.qual > b.fitness.qual;
        if (a.fitness.sem != b.fitness.sem) return a.fitness.sem > b.fitness.sem;
        if (a.fitness.ra != b.fitness.ra) return a.fitness.ra > b.fitness.ra;
        if (a.effective != b.effective) return ops_less(a.effective, b.effective);
        return genes_less(a.solution, b.solution);
    });
    // Several genomes can encode the same effective sequence; keep the first.
    front.erase(std::unique(front.begin(), front.end(),
                            [](const Individual& a, const Individual& b) { return a.effective == b.effective; }),
                front.end());
    return front;
}

json to_json(const Individual& ind, const Problem& problem, const QualityVector& before) {
    const auto& model = problem.model();
    json genes = json::array();
    for (const auto& g : ind.solution.genes) genes.push_back(to_json(g, model));
    json effective = json::array();
    for (const auto& g : ind.effective) effective.push_back(to_json(g, model));
    json qa_before = json::object(), qa_after = json::object();
    const auto b = before.as_array();
    const auto a = ind.quality_after.as_array();
    for (std::size_t i = 0; i < kQualityAttributeNames.size(); ++i) {
        qa_before[kQualityAttributeNames[i]] = b[i];
        qa_after[kQualityAttributeNames[i]] = a[i];
    }
    return json{{"genes", genes},
                {"effective", effective},
                {"qual", ind.fitness.qual},
                {"sem", ind.fitness.sem},
                {"ra", ind.fitness.ra},
                {"reviewers", ind.reviewers},
                {"per_op_scs", ind.per_op_scs},
                {"quality_before", qa_before},
                {"quality_after", qa_after}};
}

json to_json(const ParetoFront& front, const Problem& problem) {
    json solutions = json::array();
    for (const auto& ind : front.solutions) solutions.push_back(to_json(ind, problem, problem.baseline_quality()));
    return json{{"provenance",
                 {{"algorithm", front.provenance.algorithm},
                  {"seed", front.provenance.seed},
                  {"evaluations", front.provenance.evaluations},
                  {"objectives", to_string(front.provenance.mode)}}},
                {"solutions", solutions}};
}

std::string to_csv(const ParetoFront& front, const Problem& problem) {
    std::ostringstream out;
    out << "index,qual,sem,ra,effective_ops,reviewers,refactorings\n";
    for (std::size_t i = 0; i < front.solutions.size(); ++i) {
        const auto& ind = front.solutions[i];
        std::string reviewers, ops;
        for (const auto& r : ind.reviewers) reviewers += (reviewers.empty() ? "" : ";") + r;
        for (const auto& op : ind.effective) ops += (ops.empty() ? "" : ";") + describe(op, problem.model());
        out << i << ',' << format_double(ind.fitness.qual) << ',' << format_double(ind.fitness.sem) << ','
            << format_double(ind.fitness.ra) << ',' << ind.effective.size() << ',' << csv_field(reviewers) << ','
            << csv_field(ops) << '\n';
    }
    return out.str();
}

std::vector<Solution> solutions_from_json(const json& doc, const CodeModel& model) {
    const json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("solutions")) throw ParseError("front: expected a 'solutions' array");
        list = &doc["solutions"];
    }
    if (!list->is_array()) throw ParseError("front: expected an array of solutions");
    std::vector<Solution> out;
    for (const auto& entry : *list) {
        if (!entry.is_object() || !entry.contains("genes") || !entry["genes"].is_array()) {
            throw ParseError("front: every solution needs a 'genes' array");
        }
        Solution s;
        for (const auto& g : entry["genes"]) s.genes.push_back(op_from_json(g, model));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace refrev
