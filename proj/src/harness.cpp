#include "refrev/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "refrev/errors.hpp"
#include "refrev/fixtures.hpp"
#include "refrev/text.hpp"

namespace refrev {

using nlohmann::json;

namespace {

constexpr Point kReference = {-0.1, -0.1, -0.1};

} // namespace

std::string_view to_string(QualFilter f) { return f == QualFilter::NonNegative ? "nonneg" : "positive"; }

QualFilter parse_qual_filter(std::string_view text) {
    if (text == "nonneg" || text == "nonnegative") return QualFilter::NonNegative;
    if (text == "positive") return QualFilter::Positive;
    throw ConfigError("unknown qual filter '" + std::string(text) + "' (expected nonneg or positive)");
}

bool passes(QualFilter f, double qual) { return f == QualFilter::NonNegative ? qual >= 0 : qual > 0; }

Problem load_problem(const InputPaths& inputs, const ReviewParams& review, const SemanticParams& semantics) {
    review.validate();
    auto facts = load_code_facts(inputs.facts);
    const AliasMap aliases = inputs.aliases ? load_aliases(*inputs.aliases) : AliasMap{};
    const auto commits = load_commits(inputs.commits, aliases);
    const auto activities = load_activities(inputs.activity, aliases);
    ReviewerIndex index(commits, activities, review);
    return Problem(std::move(facts.model), std::move(facts.graph), std::move(index), semantics);
}

// ---------------------------------------------------------------------------
// Plans

void ExperimentPlan::validate() const {
    if (algorithms.empty()) throw ConfigError("plan: algorithm list is empty");
    if (repeats < 1) throw ConfigError("plan: repeats must be at least 1");
    if (fixture.empty() && (inputs.facts.empty() || inputs.commits.empty() || inputs.activity.empty())) {
        throw ConfigError("plan: needs facts, commits and activity paths or a fixture name");
    }
    search.validate();
    review.validate();
    if (!(semantics.alpha >= 0 && semantics.alpha <= 1)) throw ConfigError("plan: alpha must be in [0, 1]");
}

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("plan: unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <class T>
T get(const json& obj, const char* key, std::string_view where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("plan: '" + std::string(key) + "' in " + std::string(where) + " has the wrong type");
    }
}

std::size_t get_count(const json& obj, const char* key, std::string_view where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError("plan: '" + std::string(key) + "' in " + std::string(where) + " must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

ExperimentPlan parse_plan(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("plan: top level must be an object");
    check_keys(doc, "plan",
               {"facts", "commits", "activity", "aliases", "fixture", "algorithms", "repeats", "base_seed",
                "qual_filter", "output_dir", "ablation", "search", "review", "alpha"});
    ExperimentPlan plan;
    if (doc.contains("facts")) plan.inputs.facts = resolve(base_dir, get<std::string>(doc, "facts", "plan"));
    if (doc.contains("commits")) plan.inputs.commits = resolve(base_dir, get<std::string>(doc, "commits", "plan"));
    if (doc.contains("activity")) plan.inputs.activity = resolve(base_dir, get<std::string>(doc, "activity", "plan"));
    if (doc.contains("aliases")) plan.inputs.aliases = resolve(base_dir, get<std::string>(doc, "aliases", "plan"));
    if (doc.contains("fixture")) plan.fixture = get<std::string>(doc, "fixture", "plan");

    if (!doc.contains("algorithms")) throw ConfigError("plan: missing 'algorithms'");
    for (const auto& name : get<std::vector<std::string>>(doc, "algorithms", "plan")) {
        plan.algorithms.push_back(parse_algorithm(name));
    }
    if (doc.contains("repeats")) plan.repeats = get_count(doc, "repeats", "plan");
    if (doc.contains("base_seed")) plan.base_seed = get_count(doc, "base_seed", "plan");
    if (doc.contains("qual_filter")) plan.qual_filter = parse_qual_filter(get<std::string>(doc, "qual_filter", "plan"));
    plan.output_dir = resolve(base_dir, doc.contains("output_dir") ? get<std::string>(doc, "output_dir", "plan")
                                                                   : std::string("experiment"));
    if (doc.contains("ablation")) plan.ablation = get<bool>(doc, "ablation", "plan");
    if (doc.contains("alpha")) plan.semantics.alpha = get<double>(doc, "alpha", "plan");

    if (doc.contains("search")) {
        const auto& s = doc["search"];
        if (!s.is_object()) throw ConfigError("plan: 'search' must be an object");
        check_keys(s, "search",
                   {"population_size", "crossover_probability", "mutation_probability", "max_sequence_length",
                    "max_evaluations", "threads"});
        auto& c = plan.search;
        if (s.contains("population_size")) c.population_size = get_count(s, "population_size", "search");
        if (s.contains("crossover_probability")) c.crossover_probability = get<double>(s, "crossover_probability", "search");
        if (s.contains("mutation_probability")) c.mutation_probability = get<double>(s, "mutation_probability", "search");
        if (s.contains("max_sequence_length")) c.max_sequence_length = get_count(s, "max_sequence_length", "search");
        if (s.contains("max_evaluations")) c.max_evaluations = get_count(s, "max_evaluations", "search");
        if (s.contains("threads")) c.threads = get_count(s, "threads", "search");
    }
    if (doc.contains("review")) {
        const auto& r = doc["review"];
        if (!r.is_object()) throw ConfigError("plan: 'review' must be an object");
        check_keys(r, "review", {"commit_cap", "workload_cutoff", "window_start", "window_end", "max_reviewers"});
        auto& p = plan.review;
        if (r.contains("commit_cap")) p.commit_cap = get<int>(r, "commit_cap", "review");
        if (r.contains("workload_cutoff")) p.workload_cutoff = get<int>(r, "workload_cutoff", "review");
        if (r.contains("max_reviewers")) p.max_reviewers = get<int>(r, "max_reviewers", "review");
        if (r.contains("window_start") != r.contains("window_end")) {
            throw ConfigError("plan: window_start and window_end go together");
        }
        if (r.contains("window_start")) {
            try {
                p.window = TimeWindow{parse_timestamp(r["window_start"]), parse_timestamp(r["window_end"])};
            } catch (const ParseError& e) {
                throw ConfigError(std::string("plan: ") + e.what());
            }
        }
    }
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open plan file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_plan(doc, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

Problem plan_problem(const ExperimentPlan& plan) {
    if (!plan.fixture.empty()) return make_problem(fixture_by_name(plan.fixture), plan.review, plan.semantics);
    return load_problem(plan.inputs, plan.review, plan.semantics);
}

// ---------------------------------------------------------------------------
// Statistics

std::optional<Summary> summarize(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    Summary s;
    s.count = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return s;
}

std::optional<double> reviewable_ratio(std::span<const Individual> solutions) {
    if (solutions.empty()) return std::nullopt;
    const auto n = std::count_if(solutions.begin(), solutions.end(), [](const Individual& s) { return s.fitness.ra > 0; });
    return static_cast<double>(n) / static_cast<double>(solutions.size());
}

// ---------------------------------------------------------------------------
// Runs

namespace {

CellSummary summarize_cell(Algorithm algorithm, ObjectiveMode mode, std::span<const RunRecord> runs) {
    CellSummary cell{algorithm, mode, 0, 0, {}, {}, {}, {}, {}};
    std::vector<Individual> pooled;
    std::vector<double> qual, sem, ra, hv;
    for (const auto& run : runs) {
        if (run.algorithm != algorithm || run.mode != mode) continue;
        ++cell.runs;
        hv.push_back(run.hypervolume);
        for (const auto& s : run.solutions) {
            pooled.push_back(s);
            qual.push_back(s.fitness.qual);
            sem.push_back(s.fitness.sem);
            ra.push_back(s.fitness.ra);
        }
    }
    cell.solutions = pooled.size();
    cell.qual = summarize(std::move(qual));
    cell.sem = summarize(std::move(sem));
    cell.ra = summarize(std::move(ra));
    cell.hypervolume = summarize(std::move(hv));
    cell.reviewable_ratio = reviewable_ratio(pooled);
    return cell;
}

} // namespace

ExperimentReport run_experiment(const Problem& problem, const ExperimentPlan& plan, ObjectiveMode mode) {
    plan.validate();
    ExperimentReport report;
    for (auto algorithm : plan.algorithms) {
        for (std::size_t r = 0; r < plan.repeats; ++r) {
            SearchConfig config = plan.search;
            config.algorithm = algorithm;
            config.mode = mode;
            config.seed = plan.base_seed + r;
            auto front = run_search(problem, config);

            RunRecord run;
            run.algorithm = algorithm;
            run.mode = mode;
            run.seed = config.seed;
            run.evaluations = front.provenance.evaluations;
            run.front_size = front.solutions.size();
            run.hypervolume = hypervolume(objective_points(front.solutions, mode), kReference);
            for (auto& s : front.solutions) {
                if (passes(plan.qual_filter, s.fitness.qual)) run.solutions.push_back(std::move(s));
            }
            report.runs.push_back(std::move(run));
        }
    }
    for (auto algorithm : plan.algorithms) report.cells.push_back(summarize_cell(algorithm, mode, report.runs));
    return report;
}

AblationReport ablation_compare(const Problem& problem, const ExperimentPlan& plan) {
    AblationReport out;
    out.with_review = run_experiment(problem, plan, ObjectiveMode::WithReview);
    out.without_review = run_experiment(problem, plan, ObjectiveMode::WithoutReview);
    for (std::size_t i = 0; i < plan.algorithms.size(); ++i) {
        const auto& with = out.with_review.cells[i];
        const auto& without = out.without_review.cells[i];
        AblationRow row;
        row.algorithm = plan.algorithms[i];
        row.ratio_with = with.reviewable_ratio;
        row.ratio_without = without.reviewable_ratio;
        if (with.ra) row.mean_ra_with = with.ra->mean;
        if (without.ra) row.mean_ra_without = without.ra->mean;
        if (row.mean_ra_with && row.mean_ra_without && *row.mean_ra_without > 0) {
            row.ra_percent_of_without = 100.0 * *row.mean_ra_with / *row.mean_ra_without;
        }
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json summary_json(const std::optional<Summary>& s) {
    if (!s) return nullptr;
    return json{{"count", s->count}, {"min", s->min},       {"q1", s->q1},  {"median", s->median},
                {"q3", s->q3},       {"max", s->max},       {"mean", s->mean}};
}

json plan_json(const ExperimentPlan& plan) {
    json algorithms = json::array();
    for (auto a : plan.algorithms) algorithms.push_back(to_string(a));
    json search = {{"population_size", plan.search.population_size},
                   {"crossover_probability", plan.search.crossover_probability},
                   {"mutation_probability", plan.search.mutation_probability},
                   {"max_sequence_length", plan.search.max_sequence_length},
                   {"max_evaluations", plan.search.max_evaluations ? json(*plan.search.max_evaluations) : json(nullptr)}};
    json review = {{"commit_cap", plan.review.commit_cap},
                   {"workload_cutoff", plan.review.workload_cutoff},
                   {"max_reviewers", plan.review.max_reviewers}};
    if (plan.review.window) {
        review["window_start"] = plan.review.window->start;
        review["window_end"] = plan.review.window->end;
    }
    return json{{"algorithms", algorithms},
                {"repeats", plan.repeats},
                {"base_seed", plan.base_seed},
                {"qual_filter", to_string(plan.qual_filter)},
                {"alpha", plan.semantics.alpha},
                {"search", search},
                {"review", review}};
}

json runs_json(const ExperimentReport& report) {
    json runs = json::array();
    for (const auto& run : report.runs) {
        json solutions = json::array();
        for (const auto& s : run.solutions) {
            solutions.push_back({{"qual", s.fitness.qual},
                                 {"sem", s.fitness.sem},
                                 {"ra", s.fitness.ra},
                                 {"effective_ops", s.effective.size()},
                                 {"reviewers", s.reviewers}});
        }
        runs.push_back({{"algorithm", to_string(run.algorithm)},
                        {"objectives", to_string(run.mode)},
                        {"seed", run.seed},
                        {"evaluations", run.evaluations},
                        {"front_size", run.front_size},
                        {"qualified", run.solutions.size()},
                        {"hypervolume", run.hypervolume},
                        {"reviewable_ratio", optional_number(reviewable_ratio(run.solutions))},
                        {"solutions", solutions}});
    }
    return runs;
}

json cells_json(const ExperimentReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"algorithm", to_string(c.algorithm)},
                         {"objectives", to_string(c.mode)},
                         {"runs", c.runs},
                         {"solutions", c.solutions},
                         {"qual", summary_json(c.qual)},
                         {"sem", summary_json(c.sem)},
                         {"ra", summary_json(c.ra)},
                         {"hypervolume", summary_json(c.hypervolume)},
                         {"reviewable_ratio", optional_number(c.reviewable_ratio)}});
    }
    return cells;
}

std::string cell_or_na(const std::optional<double>& v) { return v ? format_double(*v) : "n/a"; }

struct Objective {
    const char* name;
    double (*get)(const Individual&);
};

constexpr Objective kObjectives[] = {
    {"qual", [](const Individual& s) { return s.fitness.qual; }},
    {"sem", [](const Individual& s) { return s.fitness.sem; }},
    {"ra", [](const Individual& s) { return s.fitness.ra; }},
};

std::vector<double> cell_values(const ExperimentReport& report, const CellSummary& cell, const Objective& o) {
    std::vector<double> out;
    for (const auto& run : report.runs) {
        if (run.algorithm != cell.algorithm || run.mode != cell.mode) continue;
        for (const auto& s : run.solutions) out.push_back(o.get(s));
    }
    return out;
}

} // namespace

json to_json(const ExperimentReport& report, const ExperimentPlan& plan) {
    return json{{"plan", plan_json(plan)}, {"summaries", cells_json(report)}, {"runs", runs_json(report)}};
}

json to_json(const AblationReport& report, const ExperimentPlan& plan) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"algorithm", to_string(r.algorithm)},
                        {"reviewable_ratio_with_review", optional_number(r.ratio_with)},
                        {"reviewable_ratio_without_review", optional_number(r.ratio_without)},
                        {"mean_ra_with_review", optional_number(r.mean_ra_with)},
                        {"mean_ra_without_review", optional_number(r.mean_ra_without)},
                        {"ra_percent_of_without_review", optional_number(r.ra_percent_of_without)}});
    }
    return json{{"plan", plan_json(plan)},
                {"comparison", rows},
                {"with_review", cells_json(report.with_review)},
                {"without_review", cells_json(report.without_review)}};
}

std::string distributions_csv(std::span<const ExperimentReport* const> reports) {
    std::ostringstream out;
    out << "algorithm,objectives,objective,count,min,q1,median,q3,max,mean\n";
    for (const auto* report : reports) {
        for (const auto& c : report->cells) {
            const std::pair<const char*, const std::optional<Summary>*> rows[] = {
                {"qual", &c.qual}, {"sem", &c.sem}, {"ra", &c.ra}, {"hypervolume", &c.hypervolume}};
            for (const auto& [name, s] : rows) {
                out << to_string(c.algorithm) << ',' << to_string(c.mode) << ',' << name << ',';
                if (!*s) {
                    out << "0,n/a,n/a,n/a,n/a,n/a,n/a\n";
                    continue;
                }
                const auto& v = **s;
                out << v.count << ',' << format_double(v.min) << ',' << format_double(v.q1) << ','
                    << format_double(v.median) << ',' << format_double(v.q3) << ',' << format_double(v.max) << ','
                    << format_double(v.mean) << '\n';
            }
        }
    }
    return out.str();
}

std::string boxplot_csv(std::span<const ExperimentReport* const> reports) {
    std::ostringstream out;
    out << "algorithm,objectives,objective,lower_whisker,q1,median,q3,upper_whisker,outliers\n";
    for (const auto* report : reports) {
        for (const auto& c : report->cells) {
            for (const auto& o : kObjectives) {
                const auto values = cell_values(*report, c, o);
                out << to_string(c.algorithm) << ',' << to_string(c.mode) << ',' << o.name << ',';
                const auto s = summarize(values);
                if (!s) {
                    out << "n/a,n/a,n/a,n/a,n/a,0\n";
                    continue;
                }
                const double iqr = s->q3 - s->q1;
                const double lo_fence = s->q1 - 1.5 * iqr, hi_fence = s->q3 + 1.5 * iqr;
                double lo = s->q1, hi = s->q3;
                std::size_t outliers = 0;
                for (double v : values) {
                    if (v < lo_fence || v > hi_fence) {
                        ++outliers;
                        continue;
                    }
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                out << format_double(lo) << ',' << format_double(s->q1) << ',' << format_double(s->median) << ','
                    << format_double(s->q3) << ',' << format_double(hi) << ',' << outliers << '\n';
            }
        }
    }
    return out.str();
}

std::string reviewable_ratio_csv(std::span<const ExperimentReport* const> reports) {
    std::ostringstream out;
    out << "algorithm,objectives,seed,solutions,reviewable,ratio\n";
    for (const auto* report : reports) {
        for (const auto& run : report->runs) {
            const auto n = std::count_if(run.solutions.begin(), run.solutions.end(),
                                         [](const Individual& s) { return s.fitness.ra > 0; });
            out << to_string(run.algorithm) << ',' << to_string(run.mode) << ',' << run.seed << ','
                << run.solutions.size() << ',' << n << ',' << cell_or_na(reviewable_ratio(run.solutions)) << '\n';
        }
        for (const auto& c : report->cells) {
            const auto ra = cell_values(*report, c, kObjectives[2]);
            const auto n = std::count_if(ra.begin(), ra.end(), [](double v) { return v > 0; });
            out << to_string(c.algorithm) << ',' << to_string(c.mode) << ",all," << c.solutions << ',' << n << ','
                << cell_or_na(c.reviewable_ratio) << '\n';
        }
    }
    return out.str();
}

std::string scatter_csv(std::span<const ExperimentReport* const> reports, bool sem_axis) {
    std::ostringstream out;
    out << "algorithm,objectives,seed," << (sem_axis ? "sem" : "qual") << ",ra\n";
    for (const auto* report : reports) {
        for (const auto& run : report->runs) {
            for (const auto& s : run.solutions) {
                out << to_string(run.algorithm) << ',' << to_string(run.mode) << ',' << run.seed << ','
                    << format_double(sem_axis ? s.fitness.sem : s.fitness.qual) << ',' << format_double(s.fitness.ra)
                    << '\n';
            }
        }
    }
    return out.str();
}

ExperimentOutput write_experiment(const ExperimentPlan& plan) {
    plan.validate();
    const Problem problem = plan_problem(plan);
    ExperimentOutput out;
    std::vector<const ExperimentReport*> reports;
    if (plan.ablation) {
        out.ablation = ablation_compare(problem, plan);
        out.report = out.ablation->with_review;
        reports = {&out.ablation->with_review, &out.ablation->without_review};
    } else {
        out.report = run_experiment(problem, plan);
        reports = {&out.report};
    }

    std::filesystem::create_directories(plan.output_dir);
    auto write = [&](const char* name, const std::string& text) {
        const auto path = plan.output_dir / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InputError("cannot write '" + path.string() + "'");
        f << text;
        out.files.push_back(path);
    };
    write("report.json", to_json(out.report, plan).dump(2) + "\n");
    if (out.ablation) write("ablation.json", to_json(*out.ablation, plan).dump(2) + "\n");
    write("distributions.csv", distributions_csv(reports));
    write("boxplot.csv", boxplot_csv(reports));
    write("scatter_qual_ra.csv", scatter_csv(reports, false));
    write("scatter_sem_ra.csv", scatter_csv(reports, true));
    write("reviewable_ratio.csv", reviewable_ratio_csv(reports));
    return out;
}

} // namespace refrev
