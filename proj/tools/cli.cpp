#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "refrev/errors.hpp"
#include "refrev/harness.hpp"
#include "refrev/search.hpp"
#include "refrev/text.hpp"

namespace refrev {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct InputFlags {
    std::string facts, commits, activity, aliases;

    void add(CLI::App& app) {
        app.add_option("--facts", facts, "Code facts JSON")->required();
        app.add_option("--commits", commits, "Commit history, one JSON object per line")->required();
        app.add_option("--activity", activity, "Pull request and issue activity JSON")->required();
        app.add_option("--aliases", aliases, "Developer alias map JSON");
    }

    InputPaths paths() const {
        InputPaths p{facts, commits, activity, std::nullopt};
        if (!aliases.empty()) p.aliases = aliases;
        return p;
    }
};

struct ReviewFlags {
    ReviewParams params;
    std::string window_start, window_end;

    void add(CLI::App& app) {
        app.add_option("--tc", params.commit_cap, "Commit cap in the expertise denominator")->capture_default_str();
        app.add_option("--tw", params.workload_cutoff, "Highest workload that still counts as available")
            ->capture_default_str();
        app.add_option("--window-start", window_start, "Workload window start (seconds or ISO date)")
            ->default_str("7 days before the end");
        app.add_option("--window-end", window_end, "Workload window end (seconds or ISO date)")
            ->default_str("latest activity, or 7 days after the start");
        app.add_option("--max-reviewers", params.max_reviewers, "Largest reviewer group")->capture_default_str();
    }

    ReviewParams resolve() const {
        ReviewParams p = params;
        if (window_start.empty() && window_end.empty()) return p;
        auto parse = [](const std::string& text, const char* flag) {
            try {
                return parse_timestamp(std::string_view(text));
            } catch (const ParseError& e) {
                throw ConfigError(std::string(flag) + ": " + e.what());
            }
        };
        if (!window_start.empty() && !window_end.empty()) {
            p.window = TimeWindow{parse(window_start, "--window-start"), parse(window_end, "--window-end")};
        } else if (!window_end.empty()) {
            const auto end = parse(window_end, "--window-end");
            p.window = TimeWindow{end - 7 * kSecondsPerDay, end};
        } else {
            const auto start = parse(window_start, "--window-start");
            p.window = TimeWindow{start, start + 7 * kSecondsPerDay};
        }
        return p;
    }
};

struct SearchFlags {
    SearchConfig config;
    std::size_t men = 0;
    std::string algorithm = "nsga2";
    std::string objectives = "qual+sem+ra";
    double alpha = SemanticParams{}.alpha;

    void add(CLI::App& app) {
        app.add_option("--alpha", alpha, "Weight of dependency similarity in semantic coherence")
            ->capture_default_str();
        app.add_option("--pop", config.population_size, "Population size")->capture_default_str();
        app.add_option("--pc", config.crossover_probability, "Crossover probability")->capture_default_str();
        app.add_option("--pm", config.mutation_probability, "Per-gene mutation probability")->capture_default_str();
        app.add_option("--max-len", config.max_sequence_length, "Refactorings per solution")->capture_default_str();
        app.add_option("--men", men, "Maximum number of evaluations")->default_str("100 x classes");
        app.add_option("--seed", config.seed, "Random seed")->capture_default_str();
        app.add_option("--algorithm", algorithm, "nsga2, spea2, ibea, mocell or random_search")
            ->capture_default_str();
        app.add_option("--objectives", objectives, "qual+sem+ra, or qual+sem to drop the review objective")
            ->capture_default_str();
        app.add_option("--threads", config.threads, "Evaluation threads")->capture_default_str();
    }

    SearchConfig resolve() const {
        SearchConfig c = config;
        c.algorithm = parse_algorithm(algorithm);
        if (objectives == "qual+sem+ra") {
            c.mode = ObjectiveMode::WithReview;
        } else if (objectives == "qual+sem") {
            c.mode = ObjectiveMode::WithoutReview;
        } else {
            throw ConfigError("--objectives must be qual+sem+ra or qual+sem");
        }
        if (men > 0) c.max_evaluations = men;
        c.validate();
        return c;
    }

    SemanticParams semantics() const {
        if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("--alpha must be in [0, 1]");
        return SemanticParams{alpha};
    }
};

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << text;
}

json read_json(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(std::string("cannot open ") + what + " '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void print_range(std::ostream& out, const char* name, std::span<const Individual> sols, double FitnessVector::*field) {
    auto [lo, hi] = std::minmax_element(sols.begin(), sols.end(), [&](const Individual& a, const Individual& b) {
        return a.fitness.*field < b.fitness.*field;
    });
    out << "  " << name << " [" << format_double(lo->fitness.*field) << ", " << format_double(hi->fitness.*field)
        << "]\n";
}

Individual reevaluate(const Problem& problem, Solution s) {
    auto e = problem.evaluate(s);
    return Individual{std::move(s), e.fitness, std::move(e.reviewers), std::move(e.effective),
                      std::move(e.per_op_scs), e.quality_after};
}

// ---------------------------------------------------------------------------

int cmd_ingest(const InputFlags& in, const ReviewFlags& rf, const std::string& out_dir, std::ostream& out) {
    const auto paths = in.paths();
    auto facts = load_code_facts(paths.facts);
    const AliasMap aliases = paths.aliases ? load_aliases(*paths.aliases) : AliasMap{};
    const auto commits = load_commits(paths.commits, aliases);
    const auto activities = load_activities(paths.activity, aliases);
    const auto params = rf.resolve();
    params.validate();
    const ReviewerIndex index(commits, activities, params);

    const auto& model = facts.model;
    const auto internal = model.internal_classes().size();
    std::size_t available = 0;
    for (std::size_t d = 0; d < index.profiles().size(); ++d) available += index.available(static_cast<std::uint32_t>(d));
    out << "classes " << internal << " internal, " << model.class_count() - internal << " external\n"
        << "members " << model.member_count() << ", edges " << facts.graph.edges().size() << "\n"
        << "commits " << commits.size() << ", activities " << activities.size() << "\n"
        << "window [" << index.window().start << ", " << index.window().end << "]\n"
        << "developers " << index.profiles().size() << ", available " << available << "\n";

    if (!out_dir.empty()) {
        json profiles = json::array();
        for (const auto& p : index.profiles()) {
            auto j = to_json(p);
            j["available"] = p.workload <= params.workload_cutoff;
            profiles.push_back(std::move(j));
        }
        const json doc{{"window", {{"start", index.window().start}, {"end", index.window().end}}},
                       {"commit_cap", params.commit_cap},
                       {"workload_cutoff", params.workload_cutoff},
                       {"developers", profiles}};
        const auto path = fs::path(out_dir) / "profiles.json";
        write_text(path, doc.dump(2) + "\n");
        out << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

int cmd_search(const InputFlags& in, const ReviewFlags& rf, const SearchFlags& sf, const std::string& out_dir,
               std::ostream& out) {
    const auto config = sf.resolve();
    const auto problem = load_problem(in.paths(), rf.resolve(), sf.semantics());
    const auto front = run_search(problem, config);

    const fs::path dir(out_dir);
    write_text(dir / "front.json", to_json(front, problem).dump(2) + "\n");
    write_text(dir / "front.csv", to_csv(front, problem));

    out << front.solutions.size() << " solutions (" << front.provenance.algorithm << ", seed " << config.seed << ", "
        << front.provenance.evaluations << " evaluations)\n";
    if (!front.solutions.empty()) {
        print_range(out, "qual", front.solutions, &FitnessVector::qual);
        print_range(out, "sem ", front.solutions, &FitnessVector::sem);
        print_range(out, "ra  ", front.solutions, &FitnessVector::ra);
    }
    out << "wrote " << (dir / "front.json").string() << " and " << (dir / "front.csv").string() << "\n";
    return kExitOk;
}

int cmd_recommend(const InputFlags& in, const ReviewFlags& rf, double alpha, const std::string& front_path,
                  std::optional<std::size_t> index, const std::string& solution_path, std::ostream& out) {
    if (front_path.empty() == solution_path.empty()) throw ConfigError("give exactly one of --front or --solution");
    if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("--alpha must be in [0, 1]");
    const auto problem = load_problem(in.paths(), rf.resolve(), SemanticParams{alpha});
    const auto& model = problem.model();

    Solution solution;
    if (!front_path.empty()) {
        const auto solutions = solutions_from_json(read_json(front_path, "front"), model);
        const std::size_t i = index.value_or(0);
        if (i >= solutions.size()) {
            throw ConfigError("solution index " + std::to_string(i) + " out of range (front has " +
                              std::to_string(solutions.size()) + ")");
        }
        solution = solutions[i];
    } else {
        const auto doc = read_json(solution_path, "solution");
        json list = doc.is_array() ? json{{"genes", doc}} : doc;
        solution = solutions_from_json(json::array({list}), model).front();
    }

    const auto ind = reevaluate(problem, solution);
    out << ind.effective.size() << " effective refactorings\n";
    for (const auto& op : ind.effective) out << "  " << describe(op, model) << "\n";
    if (ind.reviewers.empty()) {
        out << "unreviewable: no available group covers the touched files\n"
            << "reviewers (none)\n"
            << "RA 0\n";
        return kExitOk;
    }

    const auto& reviewers = problem.reviewers();
    const auto loc = loc_of(ind.effective, model);
    out << "reviewers";
    for (const auto& r : ind.reviewers) out << ' ' << r;
    out << "\n";
    for (const auto& r : ind.reviewers) {
        const auto dev = *reviewers.developer(r);
        out << "  " << r << "  workload " << reviewers.profiles()[dev].workload << "\n";
        for (const auto& [file, count] : loc) {
            const auto f = reviewers.file_id(file);
            const double exp = f ? reviewers.expertise_of(dev, *f) : 0.0;
            out << "    " << file << "  x" << count << "  expertise " << format_double(exp) << "\n";
        }
    }
    out << "RA " << format_double(ind.fitness.ra) << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& plan_path, const std::string& out_dir, std::ostream& out) {
    auto plan = load_plan(plan_path);
    if (!out_dir.empty()) plan.output_dir = out_dir;
    const auto result = write_experiment(plan);
    auto line = [&](const CellSummary& c) {
        out << "  " << to_string(c.algorithm) << " [" << to_string(c.mode) << "] runs " << c.runs << ", solutions "
            << c.solutions;
        if (c.hypervolume) out << ", median hypervolume " << format_double(c.hypervolume->median);
        out << ", reviewable " << (c.reviewable_ratio ? format_double(*c.reviewable_ratio) : "n/a") << "\n";
    };
    if (result.ablation) {
        for (const auto& c : result.ablation->with_review.cells) line(c);
        for (const auto& c : result.ablation->without_review.cells) line(c);
    } else {
        for (const auto& c : result.report.cells) line(c);
    }
    for (const auto& f : result.files) out << "wrote " << f.string() << "\n";
    return kExitOk;
}

int cmd_report(const InputFlags& in, const ReviewFlags& rf, double alpha, const std::string& front_path,
               const std::string& filter_text, const std::string& out_dir, std::ostream& out) {
    const auto filter = parse_qual_filter(filter_text);
    if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("--alpha must be in [0, 1]");
    const auto problem = load_problem(in.paths(), rf.resolve(), SemanticParams{alpha});
    const auto& model = problem.model();

    std::vector<Individual> kept;
    for (auto& s : solutions_from_json(read_json(front_path, "front"), model)) {
        auto ind = reevaluate(problem, std::move(s));
        if (passes(filter, ind.fitness.qual)) kept.push_back(std::move(ind));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const Individual& a, const Individual& b) {
        return a.fitness.as_point() > b.fitness.as_point();
    });

    const auto before = problem.baseline_quality().as_array();
    json rows = json::array();
    std::ostringstream csv;
    csv << "rank,qual,sem,ra,reviewers,refactorings\n";
    out << kept.size() << " solutions pass the " << to_string(filter) << " filter\n";
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& s = kept[i];
        std::string reviewers, ops;
        json op_list = json::array();
        for (const auto& r : s.reviewers) reviewers += (reviewers.empty() ? "" : ";") + r;
        for (const auto& op : s.effective) {
            ops += (ops.empty() ? "" : ";") + describe(op, model);
            op_list.push_back(to_json(op, model));
        }
        const auto after = s.quality_after.as_array();
        rows.push_back({{"rank", i + 1},
                        {"qual", s.fitness.qual},
                        {"sem", s.fitness.sem},
                        {"ra", s.fitness.ra},
                        {"reviewers", s.reviewers},
                        {"refactorings", op_list},
                        {"qa_before", std::vector<double>(before.begin(), before.end())},
                        {"qa_after", std::vector<double>(after.begin(), after.end())}});
        csv << i + 1 << ',' << format_double(s.fitness.qual) << ',' << format_double(s.fitness.sem) << ','
            << format_double(s.fitness.ra) << ',' << csv_field(reviewers) << ',' << csv_field(ops) << '\n';
        out << "#" << i + 1 << "  qual " << format_double(s.fitness.qual) << "  sem " << format_double(s.fitness.sem)
            << "  ra " << format_double(s.fitness.ra) << "  reviewers " << (reviewers.empty() ? "-" : reviewers)
            << "\n";
        for (const auto& op : s.effective) out << "    " << describe(op, model) << "\n";
    }
    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        json names = json::array();
        for (const char* n : kQualityAttributeNames) names.push_back(n);
        write_text(dir / "report.json",
                   json{{"qual_filter", to_string(filter)}, {"attributes", names}, {"solutions", rows}}.dump(2) + "\n");
        write_text(dir / "report.csv", csv.str());
        out << "wrote " << (dir / "report.json").string() << " and " << (dir / "report.csv").string() << "\n";
    }
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Refactoring sequences with reviewer recommendation", "refrev"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    InputFlags in;
    ReviewFlags rf;
    SearchFlags sf;
    std::string out_dir, front_path, solution_path, plan_path, qual_filter = "nonneg";
    std::optional<std::size_t> index;
    double alpha = SemanticParams{}.alpha;

    auto* ingest = app.add_subcommand("ingest", "Validate inputs and write developer profiles");
    in.add(*ingest);
    rf.add(*ingest);
    ingest->add_option("--out", out_dir, "Directory for profiles.json");

    auto* search = app.add_subcommand("search", "Search for refactoring sequences and write the front");
    in.add(*search);
    rf.add(*search);
    sf.add(*search);
    std::string search_out = "front";
    search->add_option("--out", search_out, "Directory for front.json and front.csv")->capture_default_str();

    auto* recommend = app.add_subcommand("recommend", "Recommend reviewers for one solution");
    in.add(*recommend);
    rf.add(*recommend);
    recommend->add_option("--alpha", alpha, "Weight of dependency similarity in semantic coherence")
        ->capture_default_str();
    recommend->add_option("--front", front_path, "Front JSON written by search");
    recommend->add_option("--index", index, "Solution index in the front")->default_str("0");
    recommend->add_option("--solution", solution_path, "JSON solution: {\"genes\": [...]} or an array of ops");

    auto* compare = app.add_subcommand("compare", "Run an experiment plan");
    compare->add_option("plan", plan_path, "Experiment plan JSON")->required();
    compare->add_option("--out", out_dir, "Override the plan's output directory");

    auto* report = app.add_subcommand("report", "Rank the solutions of a front");
    in.add(*report);
    rf.add(*report);
    report->add_option("--alpha", alpha, "Weight of dependency similarity in semantic coherence")
        ->capture_default_str();
    report->add_option("--front", front_path, "Front JSON written by search")->required();
    report->add_option("--qual-filter", qual_filter, "nonneg or positive")->capture_default_str();
    report->add_option("--out", out_dir, "Directory for report.json and report.csv");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfigError;
    }

    try {
        if (*ingest) return cmd_ingest(in, rf, out_dir, out);
        if (*search) return cmd_search(in, rf, sf, search_out, out);
        if (*recommend) return cmd_recommend(in, rf, alpha, front_path, index, solution_path, out);
        if (*compare) return cmd_compare(plan_path, out_dir, out);
        if (*report) return cmd_report(in, rf, alpha, front_path, qual_filter, out_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

} // namespace refrev
