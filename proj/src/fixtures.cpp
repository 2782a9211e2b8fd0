#include "refrev/fixtures.hpp"

#include <array>
#include <fstream>
#include <map>

#include "refrev/errors.hpp"
#include "refrev/random.hpp"

namespace refrev {

using nlohmann::json;

namespace {

constexpr Timestamp kEpoch = 1'672'531'200;  // 2023-01-01T00:00:00Z

class FactsBuilder {
public:
    void add_class(const std::string& id, const std::string& file, const std::string& superclass = "") {
        json c{{"id", id}, {"name", id}, {"file", file}, {"fields", json::array()}, {"methods", json::array()}};
        if (!superclass.empty()) c["superclass"] = superclass;
        index_[id] = classes_.size();
        classes_.push_back(std::move(c));
    }

    std::string field(const std::string& cls, const std::string& name, const std::string& type,
                      const std::string& visibility = "private") {
        const std::string id = cls + "." + name;
        classes_[index_.at(cls)]["fields"].push_back(
            {{"id", id}, {"name", name}, {"type", type}, {"visibility", visibility}});
        return id;
    }

    std::string method(const std::string& cls, const std::string& name, const std::vector<std::string>& params = {},
                       const std::string& returns = "void", const std::string& visibility = "public",
                       bool is_abstract = false) {
        const std::string id = cls + "#" + name;
        classes_[index_.at(cls)]["methods"].push_back({{"id", id},
                                                       {"name", name},
                                                       {"params", params},
                                                       {"returns", returns},
                                                       {"visibility", visibility},
                                                       {"abstract", is_abstract}});
        return id;
    }

    void invoke(const std::string& from, const std::string& to) {
        edges_.push_back({{"from", from}, {"to", to}, {"kind", "invoke"}});
    }
    void access(const std::string& from, const std::string& to) {
        edges_.push_back({{"from", from}, {"to", to}, {"kind", "access"}});
    }

    json build() const { return json{{"classes", classes_}, {"edges", edges_}}; }

private:
    json classes_ = json::array();
    json edges_ = json::array();
    std::map<std::string, std::size_t> index_;
};

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Five classes around one domain word: an abstract base with two subclasses,
/// a validator and a plain record. Returns the class files.
std::vector<std::string> add_package(FactsBuilder& b, const std::string& w, const std::string& next_w) {
    const std::string pkg = "src/" + lower(w) + "/";
    const std::string base = w + "Base", service = w + "Service", repo = w + "Repository",
                      validator = w + "Validator", record = w + "Record";
    std::vector<std::string> files = {pkg + base + ".java", pkg + service + ".java", pkg + repo + ".java",
                                      pkg + validator + ".java", pkg + record + ".java"};

    b.add_class(base, files[0]);
    b.add_class(service, files[1], base);
    b.add_class(repo, files[2], base);
    b.add_class(validator, files[3]);
    b.add_class(record, files[4]);

    const auto base_id = b.field(base, "id", "long", "protected");
    b.field(base, "name", "String");
    const auto get_id = b.method(base, "getId", {}, "long");
    b.access(get_id, base_id);
    b.method(base, "describe", {}, "String", "public", true);
    const auto base_validate = b.method(base, "validate" + w, {}, "boolean");
    b.access(base_validate, base_id);

    b.field(service, "repository", repo);
    b.field(service, "validator", validator);
    b.field(service, lower(w) + "Count", "int", "public");

    b.field(repo, "records", "List");
    const auto cache = b.field(repo, "cache", "Map");
    const auto find = b.method(repo, "find" + w, {"long"}, record);
    const auto save = b.method(repo, "save" + w, {"long"});
    b.method(repo, "describe", {}, "String");
    b.access(find, cache);
    b.access(save, repo + ".records");

    const auto amount = b.field(record, "amount", "double", "public");
    const auto quantity = b.field(record, "quantity", "int", "public");
    const auto label = b.field(record, "label", "String", "public");
    const auto get_amount = b.method(record, "getAmount", {}, "double");
    const auto get_quantity = b.method(record, "getQuantity", {}, "int");
    const auto set_label = b.method(record, "setLabel", {"String"});
    b.access(get_amount, amount);
    b.access(get_quantity, quantity);
    b.access(set_label, label);

    b.field(validator, "rules", "String");
    const auto check = b.method(validator, "check" + w, {"String"}, "boolean");
    b.access(check, validator + ".rules");
    const auto is_valid = b.method(validator, "isValid", {"String"}, "boolean");
    b.access(is_valid, validator + ".rules");

    const auto process = b.method(service, "process" + w, {"long"});
    b.invoke(process, save);
    b.invoke(process, find);
    b.invoke(process, check);
    b.invoke(process, get_id);
    b.method(service, "describe", {}, "String");

    // Feature envy inside the package: the total belongs with the record.
    const auto total = b.method(service, "compute" + w + "Total", {}, "double");
    b.invoke(total, get_amount);
    b.invoke(total, get_quantity);
    b.access(total, amount);

    const auto summary = b.method(repo, "summarize" + w, {}, "String");
    b.invoke(summary, get_amount);
    b.access(summary, label);
    const auto inspect = b.method(validator, "inspect" + w + "Record", {}, "boolean");
    b.invoke(inspect, get_quantity);
    b.access(inspect, label);

    // And across packages: the audit only talks to the next package.
    const auto audit = b.method(validator, "audit" + next_w + "Records", {"long"});
    b.invoke(audit, next_w + "Repository#find" + next_w);
    b.invoke(audit, next_w + "Repository#save" + next_w);
    return files;
}

CommitRecord commit(std::string sha, std::string author, Timestamp t, std::vector<std::string> files) {
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return CommitRecord{std::move(sha), std::move(author), t, std::move(files)};
}

ActivityRecord activity(std::string id, ActivityKind kind, std::vector<ActivityEvent> events) {
    return ActivityRecord{std::move(id), kind, std::move(events)};
}

std::string sha_for(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "c%05zu", i);
    return buf;
}

} // namespace

FixtureBundle micro_fixture() {
    const std::array<std::string, 8> words = {"Order",    "Payment", "Customer", "Inventory",
                                              "Shipment", "Report",  "Account",  "Catalog"};
    const std::array<std::string, 8> devs = {"alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi"};
    FactsBuilder b;
    std::vector<std::vector<std::string>> files;
    for (std::size_t p = 0; p < words.size(); ++p) files.push_back(add_package(b, words[p], words[(p + 1) % 8]));

    FixtureBundle out;
    out.facts = b.build();

    // Every package has one owner who commits to each of its files in turn.
    // Each half of the packages has a lead who touches all of them, and the
    // next package's owner chips in now and then.
    const std::array<std::string, 2> leads = {"ivan", "judy"};
    Rng rng(2023);
    std::size_t k = 0;
    for (int round = 0; round < 6; ++round) {
        for (std::size_t p = 0; p < words.size(); ++p) {
            for (const auto& f : files[p]) {
                const double roll = rng.unit();
                const auto& author = roll < 0.5 ? devs[p] : roll < 0.9 ? leads[p / 4] : devs[(p + 1) % 8];
                out.commits.push_back(commit(sha_for(k), author,
                                             kEpoch + static_cast<Timestamp>(k) * (kSecondsPerDay / 2) +
                                                 static_cast<Timestamp>(rng.index(3600)),
                                             {f}));
                ++k;
            }
        }
    }

    const Timestamp now = kEpoch + 121 * kSecondsPerDay;
    auto day = [&](int d) { return now - d * kSecondsPerDay; };
    using K = ActivityKind;
    out.activities = {
        activity("pr-101", K::PullRequest, {{"alice", day(1)}, {"bob", day(1)}}),
        activity("pr-102", K::PullRequest, {{"alice", day(2)}}),
        activity("pr-103", K::PullRequest, {{"alice", day(3)}, {"dave", day(2)}}),
        activity("issue-7", K::Issue, {{"dave", day(4)}}),
        activity("issue-8", K::Issue, {{"dave", day(5)}, {"erin", day(5)}}),
        activity("pr-104", K::PullRequest, {{"erin", day(6)}}),
        activity("pr-90", K::PullRequest, {{"grace", day(20)}, {"heidi", day(19)}}),
        activity("issue-3", K::Issue, {{"frank", day(30)}}),
        activity("pr-105", K::PullRequest, {{"carol", day(0)}}),
    };
    return out;
}

FixtureBundle busy_experts_fixture() {
    FactsBuilder b;
    std::vector<std::string> busy_files, free_files;

    // Shared audit trail of the busy half; both sides of every busy pair log to it.
    const std::string trail = "LedgerAuditTrail";
    b.add_class(trail, "src/books/LedgerAuditTrail.java");
    busy_files.push_back("src/books/LedgerAuditTrail.java");
    b.field(trail, "entries", "List");

    const std::array<std::string, 6> busy_words = {"Ledger", "Invoice", "Tariff", "Voucher", "Payroll", "Budget"};
    for (const auto& w : busy_words) {
        const std::string src = w + "EntryPrinter", dst = w + "Entry";
        const std::string fs = "src/books/" + src + ".java", fd = "src/books/" + dst + ".java";
        busy_files.push_back(fs);
        busy_files.push_back(fd);
        b.add_class(src, fs);
        b.add_class(dst, fd);
        const auto record = b.method(trail, "record" + w + "Entry", {"String"});
        b.access(record, trail + ".entries");

        const auto amount = b.field(dst, lower(w) + "Amount", "double");
        const auto date = b.field(dst, lower(w) + "Date", "String");
        const auto get_amount = b.method(dst, "get" + w + "Amount", {}, "double");
        const auto get_date = b.method(dst, "get" + w + "Date", {}, "String");
        const auto update = b.method(dst, "update" + w + "Entry", {"String"});
        b.access(get_amount, amount);
        b.access(get_date, date);
        b.access(update, amount);
        b.invoke(update, record);

        const auto format = b.field(src, lower(w) + "EntryFormat", "String");
        const auto print = b.method(src, "print" + w + "Entry", {"String"}, "String");
        b.invoke(print, get_amount);
        b.invoke(print, get_date);
        b.access(print, amount);
        b.access(print, date);
        const auto flush = b.method(src, "flush" + w + "Entry", {"String"});
        b.access(flush, format);
        b.invoke(flush, record);
    }

    // Free half: the same shape of envy with names that share nothing, plus
    // helpers that call nothing, so most moves here neither help nor hurt.
    const std::array<std::pair<std::string, std::string>, 6> free_pairs = {{{"TaskRunner", "Bucket"},
                                                                            {"MailSender", "Quota"},
                                                                            {"ThumbnailMaker", "Spool"},
                                                                            {"SyncAgent", "Lease"},
                                                                            {"IndexBuilder", "Token"},
                                                                            {"CrashHandler", "Vault"}}};
    const std::array<std::string, 6> verbs = {"dispatch", "deliver", "render", "replicate", "compile", "triage"};
    const std::array<std::string, 6> nouns = {"size", "limit", "depth", "expiry", "weight", "seal"};
    for (std::size_t i = 0; i < free_pairs.size(); ++i) {
        const auto& [src, dst] = free_pairs[i];
        const std::string fs = "src/infra/" + src + ".java", fd = "src/infra/" + dst + ".java";
        free_files.push_back(fs);
        free_files.push_back(fd);
        b.add_class(src, fs);
        b.add_class(dst, fd);

        const auto a = b.field(dst, nouns[i], "int");
        const auto get_a = b.method(dst, "peek", {}, "int");
        b.access(get_a, a);
        const auto reset = b.method(dst, "clear");
        b.access(reset, a);
        b.method(dst, nouns[i] + "Hint", {}, "String");
        b.method(dst, nouns[i] + "Note", {}, "String");

        const auto state = b.field(src, "state", "int");
        const auto work = b.method(src, verbs[i], {}, "int");
        b.invoke(work, get_a);
        b.access(work, a);
        const auto stop = b.method(src, "halt");
        b.access(stop, state);
        b.method(src, verbs[i] + "Label", {}, "String");
        b.method(src, "version", {}, "int");
        b.method(src, verbs[i] + "Summary", {}, "String");
    }

    FixtureBundle out;
    out.facts = b.build();

    std::size_t k = 0;
    Timestamp t = kEpoch;
    for (int round = 0; round < 4; ++round) {
        for (std::size_t i = 0; i < busy_files.size(); ++i) {
            const std::string author = i % 2 == 0 ? "bianca" : "boris";
            out.commits.push_back(commit(sha_for(k++), author, t, {busy_files[i]}));
            t += 3 * 3600;
        }
        for (std::size_t i = 0; i < free_files.size(); ++i) {
            const std::string author = i % 2 == 0 ? "fiona" : "felix";
            out.commits.push_back(commit(sha_for(k++), author, t, {free_files[i]}));
            t += 3 * 3600;
        }
    }

    const Timestamp now = t + kSecondsPerDay;
    auto day = [&](int d) { return now - d * kSecondsPerDay; };
    using K = ActivityKind;
    out.activities = {
        activity("pr-1", K::PullRequest, {{"bianca", day(1)}}),
        activity("pr-2", K::PullRequest, {{"bianca", day(2)}, {"boris", day(2)}}),
        activity("pr-3", K::PullRequest, {{"bianca", day(3)}}),
        activity("issue-1", K::Issue, {{"boris", day(1)}}),
        activity("issue-2", K::Issue, {{"boris", day(4)}}),
        activity("pr-4", K::PullRequest, {{"fiona", day(2)}, {"felix", day(2)}}),
        activity("issue-3", K::Issue, {{"felix", day(5)}}),
        activity("pr-5", K::PullRequest, {{"fiona", day(0)}}),
    };
    return out;
}

FixtureBundle common_reviewer_fixture() {
    FactsBuilder b;
    std::vector<std::string> files;
    for (const auto& f : add_package(b, "Order", "Payment")) files.push_back(f);
    for (const auto& f : add_package(b, "Payment", "Order")) files.push_back(f);

    FixtureBundle out;
    out.facts = b.build();
    std::size_t k = 0;
    Timestamp t = kEpoch;
    // The oldest commit carries no recency weight, so it touches no code.
    out.commits.push_back(commit(sha_for(k++), "casey", t, {"README.md"}));
    t += kSecondsPerDay;
    for (std::size_t i = 0; i < files.size(); ++i) {
        out.commits.push_back(commit(sha_for(k++), "casey", t, {files[i]}));
        t += kSecondsPerDay;
        out.commits.push_back(commit(sha_for(k++), i % 2 == 0 ? "morgan" : "riley", t, {files[i]}));
        t += kSecondsPerDay;
    }
    const Timestamp now = t;
    auto day = [&](int d) { return now - d * kSecondsPerDay; };
    using K = ActivityKind;
    out.activities = {
        activity("pr-1", K::PullRequest, {{"morgan", day(1)}, {"riley", day(1)}}),
        activity("pr-2", K::PullRequest, {{"morgan", day(2)}, {"riley", day(3)}}),
        activity("issue-1", K::Issue, {{"morgan", day(2)}, {"riley", day(2)}}),
        activity("pr-3", K::PullRequest, {{"casey", day(1)}}),
    };
    return out;
}

FixtureBundle fixture_by_name(std::string_view name) {
    if (name == "micro") return micro_fixture();
    if (name == "busy-experts") return busy_experts_fixture();
    if (name == "common-reviewer") return common_reviewer_fixture();
    throw ConfigError("unknown fixture '" + std::string(name) + "'");
}

void write_fixture(const FixtureBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw InputError("cannot write '" + (dir / name).string() + "'");
        return out;
    };
    {
        auto out = open("facts.json");
        out << bundle.facts.dump(2) << '\n';
    }
    {
        auto out = open("commits.jsonl");
        for (const auto& c : bundle.commits) out << to_json(c).dump() << '\n';
    }
    {
        json acts = json::array();
        for (const auto& a : bundle.activities) acts.push_back(to_json(a));
        auto out = open("activity.json");
        out << acts.dump(2) << '\n';
    }
}

Problem make_problem(const FixtureBundle& bundle, const ReviewParams& review, const SemanticParams& semantics) {
    auto facts = parse_code_facts(bundle.facts);
    ReviewerIndex index(bundle.commits, bundle.activities, review);
    return Problem(std::move(facts.model), std::move(facts.graph), std::move(index), semantics);
}

} // namespace refrev
