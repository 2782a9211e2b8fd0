#include "refrev/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace refrev {

namespace {

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void push_token(std::vector<std::string>& out, std::string_view raw) {
    if (raw.size() < 2) return;
    if (std::all_of(raw.begin(), raw.end(), is_digit)) return;
    std::string token(raw);
    for (auto& ch : token) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out.push_back(std::move(token));
}

std::vector<MemberId> sorted_unique(std::vector<MemberId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

std::vector<std::string> split_identifier(std::string_view identifier) {
    std::vector<std::string> out;
    std::size_t start = 0;
    const std::size_t n = identifier.size();
    for (std::size_t i = 0; i <= n; ++i) {
        if (i == n || !is_alnum(identifier[i])) {
            push_token(out, identifier.substr(start, i - start));
            start = i + 1;
            continue;
        }
        if (i == start) continue;
        const char prev = identifier[i - 1];
        const char cur = identifier[i];
        const bool next_lower = i + 1 < n && is_lower(identifier[i + 1]);
        const bool boundary = (is_lower(prev) && is_upper(cur)) || (is_digit(prev) != is_digit(cur)) ||
                              (is_upper(prev) && is_upper(cur) && next_lower);
        if (boundary) {
            push_token(out, identifier.substr(start, i - start));
            start = i;
        }
    }
    return out;
}

TokenCounts class_vocabulary(const CodeModel& model, ClassId c) {
    TokenCounts counts;
    for (auto& t : split_identifier(model.class_decl(c).name)) ++counts[t];
    for (auto m : model.members_of(c)) {
        for (auto& t : split_identifier(model.member_decl(m).name)) ++counts[t];
    }
    return counts;
}

double cosine_similarity(const TokenCounts& a, const TokenCounts& b) {
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [tok, n] : a) {
        na += static_cast<double>(n) * n;
        if (auto it = b.find(tok); it != b.end()) dot += static_cast<double>(n) * it->second;
    }
    for (const auto& [tok, n] : b) nb += static_cast<double>(n) * n;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double jaccard(std::span<const MemberId> a, std::span<const MemberId> b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double blend_similarity(double ds, double vs, const SemanticParams& params) {
    return params.alpha * ds + (1.0 - params.alpha) * vs;
}

SemanticIndex::SemanticIndex(const CodeModel& model, const CallGraph& graph) {
    const auto n = model.class_count();
    vocab_.resize(n);
    out_.resize(n);
    in_.resize(n);
    const auto members = model.members_by_class();
    for (std::uint32_t i = 0; i < n; ++i) {
        const ClassId c{i};
        for (auto& t : split_identifier(model.class_decl(c).name)) ++vocab_[i][t];
        std::vector<MemberId> out, in;
        for (auto m : members[i]) {
            for (auto& t : split_identifier(model.member_decl(m).name)) ++vocab_[i][t];
            auto succ = graph.successors(m);
            auto pred = graph.predecessors(m);
            out.insert(out.end(), succ.begin(), succ.end());
            in.insert(in.end(), pred.begin(), pred.end());
        }
        out_[i] = sorted_unique(std::move(out));
        in_[i] = sorted_unique(std::move(in));
    }
}

double SemanticIndex::vocabulary_similarity(ClassId a, ClassId b) const {
    return cosine_similarity(vocab_[a.value], vocab_[b.value]);
}

double SemanticIndex::dependency_similarity(ClassId a, ClassId b) const {
    return 0.5 * (jaccard(out_[a.value], out_[b.value]) + jaccard(in_[a.value], in_[b.value]));
}

double SemanticIndex::scs(ClassId a, ClassId b, const SemanticParams& params) const {
    return blend_similarity(dependency_similarity(a, b), vocabulary_similarity(a, b), params);
}

SemanticScore sem_of_sequence(std::span<const RefactoringOp> effective, const SemanticIndex& index,
                              const SemanticParams& params) {
    SemanticScore out;
    if (effective.empty()) return out;
    double total = 0;
    for (const auto& op : effective) {
        const double s = index.scs(op.source, op.target, params);
        out.per_op_scs.push_back(s);
        total += s;
    }
    out.sem = total / static_cast<double>(effective.size());
    return out;
}

} // namespace refrev
