#include <doctest.h>

#include <fstream>
#include <sstream>

#include <cli.hpp>

#include "sample.hpp"

using namespace refrev;

namespace {

struct Result {
    int code = 0;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> glide_inputs() {
    const auto d = sample::glide_dir();
    return {"--facts",    (d / "facts.json").string(),    "--commits", (d / "commits.jsonl").string(),
            "--activity", (d / "activity.json").string(), "--aliases", (d / "aliases.json").string()};
}

std::vector<std::string> cmd(std::string name, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{std::move(name)};
    for (auto& a : glide_inputs()) args.push_back(a);
    for (auto& a : extra) args.push_back(a);
    return args;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& haystack, const std::string& needle) { return haystack.find(needle) != std::string::npos; }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help documents every default") {
    auto top = run({"--help"});
    CHECK(top.code == kExitOk);
    for (const char* sub : {"ingest", "search", "recommend", "compare", "report"}) CHECK(contains(top.out, sub));

    auto search = run({"search", "--help"});
    CHECK(search.code == kExitOk);
    for (const char* flag : {"--tc INT [10]", "--tw INT [2]", "--max-reviewers INT [2]", "--alpha FLOAT [0.8]",
                             "--pop UINT [100]", "--pc FLOAT [0.9]", "--pm FLOAT [0.05]", "--max-len UINT [5]",
                             "--men UINT [100 x classes]", "--seed UINT [1]", "--algorithm TEXT [nsga2]",
                             "--window-start", "--window-end"}) {
        CHECK_MESSAGE(contains(search.out, flag), flag);
    }
    auto report = run({"report", "--help"});
    CHECK(contains(report.out, "--qual-filter TEXT [nonneg]"));
}

TEST_CASE("ingest summarizes the histories") {
    const auto dir = sample::scratch_dir("cli-ingest");
    auto r = run(cmd("ingest", {"--out", dir.string()}));
    REQUIRE(r.code == kExitOk);
    CHECK(contains(r.out, "commits 6, activities 5"));
    CHECK(std::filesystem::exists(dir / "profiles.json"));
    auto profiles = nlohmann::json::parse(slurp(dir / "profiles.json"));
    CHECK(profiles.dump().find("B-laptop") == std::string::npos);
}

TEST_CASE("search writes a front and is repeatable") {
    const auto a = sample::scratch_dir("cli-search-a"), b = sample::scratch_dir("cli-search-b");
    auto r1 = run(cmd("search", {"--men", "400", "--pop", "20", "--seed", "4", "--out", a.string()}));
    REQUIRE(r1.code == kExitOk);
    auto r2 = run(cmd("search", {"--men", "400", "--pop", "20", "--seed", "4", "--out", b.string()}));
    REQUIRE(r2.code == kExitOk);
    CHECK(slurp(a / "front.json") == slurp(b / "front.json"));
    CHECK(slurp(a / "front.csv") == slurp(b / "front.csv"));
    auto front = nlohmann::json::parse(slurp(a / "front.json"));
    CHECK(front["solutions"].size() >= 1);
    CHECK(front["provenance"]["evaluations"].get<int>() <= 400);
    CHECK(r1.out.substr(0, r1.out.find("wrote")) == r2.out.substr(0, r2.out.find("wrote")));
}

TEST_CASE("random search is recorded in the provenance") {
    const auto dir = sample::scratch_dir("cli-random");
    auto r = run(cmd("search", {"--algorithm", "random", "--men", "200", "--out", dir.string()}));
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(slurp(dir / "front.json"))["provenance"]["algorithm"] == "random_search");
}

TEST_CASE("input and config errors map to exit codes") {
    auto args = cmd("search", {"--out", sample::scratch_dir("cli-err").string()});
    args[4] = "/nonexistent/commits.jsonl";
    auto missing = run(args);
    CHECK(missing.code == kExitInputError);
    CHECK(contains(missing.err, "/nonexistent/commits.jsonl"));

    CHECK(run(cmd("search", {"--pm", "1.5"})).code == kExitConfigError);
    CHECK(run(cmd("search", {"--pop", "7"})).code == kExitConfigError);
    CHECK(run(cmd("search", {"--algorithm", "hillclimb"})).code == kExitConfigError);
    CHECK(run(cmd("search", {"--window-start", "soon"})).code == kExitConfigError);
    CHECK(run({"search"}).code == kExitConfigError);
    CHECK(run({"frobnicate"}).code == kExitConfigError);
}

TEST_CASE("recommend prints the glide group") {
    auto r = run(cmd("recommend", {"--solution", (sample::glide_dir() / "solution.json").string()}));
    REQUIRE(r.code == kExitOk);
    CHECK(contains(r.out, "reviewers B D"));
    CHECK(contains(r.out, "  B  workload 1"));
    CHECK(contains(r.out, "  D  workload 2"));
    CHECK(contains(r.out, "ActiveResources.java  x2  expertise 0.24"));
    CHECK(contains(r.out, "EngineResource.java  x1  expertise 0.19999999999999998"));
    CHECK(contains(r.out, "RA 0.34"));
}

TEST_CASE("recommend reports unreviewable solutions and bad indices") {
    const auto dir = sample::scratch_dir("cli-recommend");
    std::ofstream(dir / "lonely.json")
        << R"([{"kind": "MoveMethod", "class1": "Key", "class2": "Engine", "member": "Key#updateDiskCacheKey"}])";
    auto r = run(cmd("recommend", {"--solution", (dir / "lonely.json").string()}));
    REQUIRE(r.code == kExitOk);
    CHECK(contains(r.out, "unreviewable"));
    CHECK(contains(r.out, "RA 0"));

    REQUIRE(run(cmd("search", {"--men", "200", "--pop", "20", "--out", dir.string()})).code == kExitOk);
    CHECK(run(cmd("recommend", {"--front", (dir / "front.json").string(), "--index", "0"})).code == kExitOk);
    auto bad = run(cmd("recommend", {"--front", (dir / "front.json").string(), "--index", "999"}));
    CHECK(bad.code == kExitConfigError);
    CHECK(contains(bad.err, "999"));
}

TEST_CASE("report ranks a saved front") {
    const auto dir = sample::scratch_dir("cli-report");
    REQUIRE(run(cmd("search", {"--men", "300", "--pop", "20", "--out", dir.string()})).code == kExitOk);
    auto r = run(cmd("report", {"--front", (dir / "front.json").string(), "--qual-filter", "positive", "--out",
                                (dir / "ranked").string()}));
    REQUIRE(r.code == kExitOk);
    auto doc = nlohmann::json::parse(slurp(dir / "ranked" / "report.json"));
    for (const auto& s : doc["solutions"]) {
        CHECK(s["qual"].get<double>() > 0);
        CHECK(s["qa_before"].size() == 6);
        CHECK(s["qa_after"].size() == 6);
    }
    CHECK(std::filesystem::exists(dir / "ranked" / "report.csv"));
    CHECK(run(cmd("report", {"--front", (dir / "front.json").string(), "--qual-filter", "most"})).code ==
          kExitConfigError);
}

TEST_CASE("compare runs comparison and ablation plans") {
    const auto dir = sample::scratch_dir("cli-compare");
    std::ofstream(dir / "rq2.json") << R"({"fixture": "micro", "repeats": 1, "output_dir": "rq2",
        "algorithms": ["nsga2", "spea2", "ibea", "mocell", "random_search"], "search": {"max_evaluations": 200}})";
    auto rq2 = run({"compare", (dir / "rq2.json").string()});
    REQUIRE(rq2.code == kExitOk);
    const auto dist = slurp(dir / "rq2" / "distributions.csv");
    for (const char* a : {"nsga2,", "spea2,", "ibea,", "mocell,", "random_search,"}) CHECK(contains(dist, a));

    std::ofstream(dir / "rq3.json") << R"({"fixture": "busy-experts", "repeats": 1, "output_dir": "rq3",
        "algorithms": ["nsga2"], "ablation": true, "search": {"max_evaluations": 200}})";
    REQUIRE(run({"compare", (dir / "rq3.json").string()}).code == kExitOk);
    CHECK(std::filesystem::exists(dir / "rq3" / "ablation.json"));
    CHECK(std::filesystem::exists(dir / "rq3" / "scatter_qual_ra.csv"));
    CHECK(std::filesystem::exists(dir / "rq3" / "scatter_sem_ra.csv"));

    std::ofstream(dir / "broken.json") << R"({"fixture": "micro", "algorithms": "nsga2"})";
    CHECK(run({"compare", (dir / "broken.json").string()}).code == kExitConfigError);
    std::ofstream(dir / "garbled.json") << "{{";
    CHECK(run({"compare", (dir / "garbled.json").string()}).code == kExitConfigError);
}

}
