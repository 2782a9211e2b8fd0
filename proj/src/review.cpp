#include "refrev/review.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "refrev/errors.hpp"

namespace refrev {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Timestamps

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

} // namespace

Timestamp parse_timestamp(std::string_view text) {
    const std::string s(text);
    if (!s.empty() && std::all_of(s.begin() + (s[0] == '-' ? 1 : 0), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        try {
            return std::stoll(s);
        } catch (const std::exception&) {
            throw ParseError("timestamp out of range: '" + s + "'");
        }
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char tail[8] = {0};
    const int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%7s", &y, &mo, &d, &h, &mi, &se, tail);
    const bool date_only = n == 3 && s.size() == 10;
    const bool full = n >= 6 && (n == 6 || std::string(tail) == "Z");
    if (!(date_only || full) || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) {
        throw ParseError("malformed timestamp '" + s + "'");
    }
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * kSecondsPerDay + h * 3600 +
           mi * 60 + se;
}

Timestamp parse_timestamp(const json& value) {
    if (value.is_number_integer()) return value.get<Timestamp>();
    if (value.is_string()) return parse_timestamp(std::string_view(value.get_ref<const std::string&>()));
    throw ParseError("timestamp must be an integer or an ISO-8601 string");
}

void ReviewParams::validate() const {
    if (commit_cap < 1) throw ConfigError("commit cap must be a positive integer");
    if (workload_cutoff < 0) throw ConfigError("workload cutoff must be nonnegative");
    if (max_reviewers < 1 || max_reviewers > 8) throw ConfigError("max reviewers must be in [1, 8]");
    if (window && window->start >= window->end) throw ConfigError("window start must precede window end");
}

// ---------------------------------------------------------------------------
// Ingestion

AliasMap AliasMap::from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("aliases: top level must be an object");
    AliasMap map;
    for (const auto& [canonical, aliases] : doc.items()) {
        if (!aliases.is_array()) throw ParseError("aliases: '" + canonical + "' must map to an array");
        for (const auto& a : aliases) {
            if (!a.is_string()) throw ParseError("aliases: entries of '" + canonical + "' must be strings");
            auto [it, inserted] = map.to_canonical_.emplace(a.get<std::string>(), canonical);
            if (!inserted && it->second != canonical) {
                throw ValidationError("aliases: '" + it->first + "' maps to both '" + it->second + "' and '" +
                                      canonical + "'");
            }
        }
    }
    return map;
}

const std::string& AliasMap::canonical(const std::string& name) const {
    auto it = to_canonical_.find(name);
    return it == to_canonical_.end() ? name : it->second;
}

namespace {

json read_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(std::string("cannot open ") + what + " file '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": malformed JSON: " + e.what());
    }
}

} // namespace

AliasMap load_aliases(const std::filesystem::path& path) {
    try {
        return AliasMap::from_json(read_json_file(path, "aliases"));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<CommitRecord> parse_commits(std::istream& in, const AliasMap& aliases) {
    std::vector<CommitRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "commits line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw ParseError(where + ": malformed JSON");
        }
        if (!j.is_object()) throw ParseError(where + ": expected an object");
        CommitRecord c;
        try {
            c.sha = j.at("sha").get<std::string>();
            c.author = aliases.canonical(j.at("author").get<std::string>());
            c.timestamp = parse_timestamp(j.at("timestamp"));
            c.files = j.value("files", std::vector<std::string>{});
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        std::sort(c.files.begin(), c.files.end());
        c.files.erase(std::unique(c.files.begin(), c.files.end()), c.files.end());
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CommitRecord> load_commits(const std::filesystem::path& path, const AliasMap& aliases) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open commits file '" + path.string() + "'");
    try {
        return parse_commits(in, aliases);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<ActivityRecord> parse_activities(const json& doc, const AliasMap& aliases) {
    if (!doc.is_array()) throw ParseError("activity: top level must be an array");
    std::vector<ActivityRecord> out;
    for (const auto& j : doc) {
        ActivityRecord a;
        try {
            a.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "pull_request") {
                a.kind = ActivityKind::PullRequest;
            } else if (kind == "issue") {
                a.kind = ActivityKind::Issue;
            } else {
                throw ParseError("activity '" + a.id + "': unknown kind '" + kind + "'");
            }
            for (const auto& e : j.at("events")) {
                a.events.push_back({aliases.canonical(e.at("actor").get<std::string>()), parse_timestamp(e.at("timestamp"))});
            }
        } catch (const json::exception& e) {
            throw ParseError("activity '" + a.id + "': " + e.what());
        }
        if (a.events.empty()) throw ValidationError("activity '" + a.id + "': events must be nonempty");
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<ActivityRecord> load_activities(const std::filesystem::path& path, const AliasMap& aliases) {
    try {
        return parse_activities(read_json_file(path, "activity"), aliases);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Formulas

double recency(Timestamp t, Timestamp repo_first, Timestamp repo_last) {
    if (t < repo_first || t > repo_last) throw std::out_of_range("commit timestamp outside repository span");
    if (repo_first == repo_last) return 1.0;
    return static_cast<double>(t - repo_first) / static_cast<double>(repo_last - repo_first);
}

double expertise(std::string_view developer, std::string_view file, std::span<const CommitRecord> commits,
                 int commit_cap) {
    if (commits.empty()) return 0.0;
    Timestamp first = commits.front().timestamp, last = commits.front().timestamp;
    for (const auto& c : commits) {
        first = std::min(first, c.timestamp);
        last = std::max(last, c.timestamp);
    }
    std::size_t on_file = 0;
    double weighted = 0;
    for (const auto& c : commits) {
        if (std::find(c.files.begin(), c.files.end(), file) == c.files.end()) continue;
        ++on_file;
        if (c.author == developer) weighted += recency(c.timestamp, first, last);
    }
    if (on_file == 0) return 0.0;
    const double denom = static_cast<double>(std::min<std::size_t>(on_file, static_cast<std::size_t>(commit_cap)));
    return std::min(1.0, weighted / denom);
}

int workload(std::string_view developer, std::span<const ActivityRecord> activities, TimeWindow window) {
    std::set<std::pair<ActivityKind, std::string>> touched;
    for (const auto& a : activities) {
        for (const auto& e : a.events) {
            if (e.actor == developer && e.timestamp >= window.start && e.timestamp <= window.end) {
                touched.emplace(a.kind, a.id);
                break;
            }
        }
    }
    return static_cast<int>(touched.size());
}

TimeWindow default_window(std::span<const CommitRecord> commits, std::span<const ActivityRecord> activities) {
    std::optional<Timestamp> end;
    for (const auto& a : activities) {
        for (const auto& e : a.events) end = std::max(end.value_or(e.timestamp), e.timestamp);
    }
    if (!end) {
        for (const auto& c : commits) end = std::max(end.value_or(c.timestamp), c.timestamp);
    }
    const Timestamp e = end.value_or(0);
    return {e - 7 * kSecondsPerDay, e};
}

// ---------------------------------------------------------------------------
// ReviewerIndex

ReviewerIndex::ReviewerIndex(std::span<const CommitRecord> commits, std::span<const ActivityRecord> activities,
                             const ReviewParams& params)
    : params_(params), window_(params.window.value_or(default_window(commits, activities))) {
    std::vector<std::string> devs;
    std::vector<std::string> files;
    for (const auto& c : commits) {
        devs.push_back(c.author);
        files.insert(files.end(), c.files.begin(), c.files.end());
    }
    for (const auto& a : activities) {
        for (const auto& e : a.events) devs.push_back(e.actor);
    }
    std::sort(devs.begin(), devs.end());
    devs.erase(std::unique(devs.begin(), devs.end()), devs.end());
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());

    profiles_.resize(devs.size());
    for (std::uint32_t i = 0; i < devs.size(); ++i) {
        profiles_[i].id = devs[i];
        developer_index_.emplace(devs[i], i);
    }
    for (std::uint32_t i = 0; i < files.size(); ++i) file_index_.emplace(files[i], i);

    // Expertise.
    std::vector<std::size_t> commit_count(files.size(), 0);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> weighted;  // (file, developer)
    if (!commits.empty()) {
        auto [lo, hi] = std::minmax_element(commits.begin(), commits.end(),
                                            [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
        const Timestamp first = lo->timestamp, last = hi->timestamp;
        for (const auto& c : commits) {
            const double r = recency(c.timestamp, first, last);
            const auto dev = developer_index_.at(c.author);
            for (const auto& f : c.files) {
                const auto fid = file_index_.at(f);
                ++commit_count[fid];
                weighted[{fid, dev}] += r;
            }
        }
    }
    experts_.assign(files.size(), {});
    for (const auto& [key, sum] : weighted) {
        const auto [fid, dev] = key;
        const double denom =
            static_cast<double>(std::min<std::size_t>(commit_count[fid], static_cast<std::size_t>(params_.commit_cap)));
        const double exp = std::min(1.0, sum / denom);
        profiles_[dev].expertise[files[fid]] = exp;
        if (exp > 0) experts_[fid].push_back({dev, exp});
    }

    // Workload: distinct activities with an event inside the window.
    std::vector<std::set<std::pair<ActivityKind, std::string>>> touched(devs.size());
    for (const auto& a : activities) {
        for (const auto& e : a.events) {
            if (e.timestamp >= window_.start && e.timestamp <= window_.end) {
                touched[developer_index_.at(e.actor)].emplace(a.kind, a.id);
            }
        }
    }
    for (std::size_t i = 0; i < devs.size(); ++i) profiles_[i].workload = static_cast<int>(touched[i].size());
}

std::optional<std::uint32_t> ReviewerIndex::developer(std::string_view id) const {
    auto it = developer_index_.find(std::string(id));
    if (it == developer_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> ReviewerIndex::file_id(std::string_view path) const {
    auto it = file_index_.find(std::string(path));
    if (it == file_index_.end()) return std::nullopt;
    return it->second;
}

double ReviewerIndex::expertise_of(std::uint32_t developer, std::uint32_t file) const {
    for (const auto& e : experts_[file]) {
        if (e.developer == developer) return e.expertise;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Reviewer recommendation

FileMultiset loc_of(std::span<const RefactoringOp> effective, const CodeModel& model) {
    FileMultiset out;
    for (const auto& op : effective) {
        const auto& a = model.class_decl(op.source).file;
        const auto& b = model.class_decl(op.target).file;
        ++out[a];
        if (b != a) ++out[b];
    }
    return out;
}

namespace {

struct Candidate {
    std::uint32_t developer;
    double score;
    std::uint64_t mask;
};

struct Group {
    double score = 0;
    std::vector<std::uint32_t> members;  // ascending developer index == ascending id
};

bool better(const Group& a, const Group& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
}

class GroupSearch {
public:
    GroupSearch(std::vector<Candidate> pool, std::uint64_t full, std::size_t max_size)
        : pool_(std::move(pool)), full_(full), max_size_(max_size) {
        std::sort(pool_.begin(), pool_.end(), [](const Candidate& a, const Candidate& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.developer < b.developer;
        });
    }

    std::optional<Group> run() {
        chosen_.clear();
        visit(0, 0, 0.0);
        return best_;
    }

private:
    void visit(std::size_t start, std::uint64_t mask, double partial) {
        const std::size_t slots = max_size_ - chosen_.size();
        for (std::size_t i = start; i < pool_.size(); ++i) {
            if (best_) {
                double bound = partial;
                for (std::size_t k = i; k < std::min(pool_.size(), i + slots); ++k) bound += pool_[k].score;
                if (bound < best_->score - 1e-12 * std::max(1.0, best_->score)) break;
            }
            chosen_.push_back(i);
            const auto m = mask | pool_[i].mask;
            if (m == full_) consider();
            if (slots > 1) visit(i + 1, m, partial + pool_[i].score);
            chosen_.pop_back();
        }
    }

    void consider() {
        Group g;
        for (auto i : chosen_) g.members.push_back(pool_[i].developer);
        std::sort(g.members.begin(), g.members.end());
        for (auto dev : g.members) {
            for (const auto& c : pool_) {
                if (c.developer == dev) g.score += c.score;
            }
        }
        if (!best_ || better(g, *best_)) best_ = std::move(g);
    }

    std::vector<Candidate> pool_;
    std::uint64_t full_;
    std::size_t max_size_;
    std::vector<std::size_t> chosen_;
    std::optional<Group> best_;
};

} // namespace

ReviewerRecommendation recommend_reviewers(std::span<const TouchedFile> loc, std::size_t op_count,
                                           const ReviewerIndex& index) {
    if (op_count == 0 || loc.empty()) return {};

    std::map<std::uint32_t, int> distinct;
    for (const auto& t : loc) {
        if (!t.file) return {};  // nobody ever committed to it
        distinct[*t.file] += t.count;
    }
    if (distinct.size() > 64) throw std::length_error("reviewer search supports at most 64 distinct files");

    std::map<std::uint32_t, Candidate> by_dev;
    std::uint64_t full = 0;
    std::uint64_t bit = 1;
    for (const auto& [file, count] : distinct) {
        full |= bit;
        for (const auto& e : index.experts(file)) {
            if (!index.available(e.developer)) continue;
            auto& c = by_dev.try_emplace(e.developer, Candidate{e.developer, 0.0, 0}).first->second;
            c.score += count * e.expertise;
            c.mask |= bit;
        }
        bit <<= 1;
    }

    std::vector<Candidate> pool;
    for (const auto& [dev, c] : by_dev) {
        if (!index.params().strict_coverage || c.mask == full) pool.push_back(c);
    }
    auto best = GroupSearch(std::move(pool), full, static_cast<std::size_t>(index.params().max_reviewers)).run();
    if (!best) return {};

    ReviewerRecommendation out;
    out.ra = best->score / static_cast<double>(op_count);
    for (auto dev : best->members) out.group.push_back(index.profiles()[dev].id);
    return out;
}

ReviewerRecommendation recommend_reviewers(const FileMultiset& loc, std::size_t op_count,
                                           const ReviewerIndex& index) {
    std::vector<TouchedFile> touched;
    for (const auto& [path, count] : loc) touched.push_back({index.file_id(path), count});
    return recommend_reviewers(std::span<const TouchedFile>(touched), op_count, index);
}

ReviewerRecommendation recommend_reviewers(std::span<const RefactoringOp> effective, const CodeModel& model,
                                           const ReviewerIndex& index) {
    return recommend_reviewers(loc_of(effective, model), effective.size(), index);
}

json to_json(const DeveloperProfile& profile) {
    return json{{"id", profile.id}, {"expertise", profile.expertise}, {"workload", profile.workload}};
}

json to_json(const CommitRecord& commit) {
    return json{{"sha", commit.sha}, {"author", commit.author}, {"timestamp", commit.timestamp}, {"files", commit.files}};
}

json to_json(const ActivityRecord& activity) {
    json events = json::array();
    for (const auto& e : activity.events) events.push_back({{"actor", e.actor}, {"timestamp", e.timestamp}});
    return json{{"id", activity.id},
                {"kind", activity.kind == ActivityKind::PullRequest ? "pull_request" : "issue"},
                {"events", events}};
}

} // namespace refrev
