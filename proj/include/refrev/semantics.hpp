#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refrev/code_model.hpp"
#include "refrev/refactoring.hpp"

namespace refrev {

/// Identifier tokens: camelCase, acronym and underscore boundaries split,
/// lowercased, numeric and single-character tokens dropped.
std::vector<std::string> split_identifier(std::string_view identifier);

/// Token multiset of one class vocabulary.
using TokenCounts = std::map<std::string, int>;

TokenCounts class_vocabulary(const CodeModel& model, ClassId c);

/// Cosine of two token-frequency vectors; 0 if either is empty.
double cosine_similarity(const TokenCounts& a, const TokenCounts& b);

/// |a ∩ b| / |a ∪ b| over sorted unique ranges; 0 when both are empty.
double jaccard(std::span<const MemberId> a, std::span<const MemberId> b);

struct SemanticParams {
    double alpha = 0.8;
};

/// Blend of dependency and vocabulary similarity.
double blend_similarity(double ds, double vs, const SemanticParams& params);

/// Precomputed vocabularies and call-graph neighbourhoods of a model snapshot.
/// Read-only after construction.
class SemanticIndex {
public:
    SemanticIndex() = default;
    SemanticIndex(const CodeModel& model, const CallGraph& graph);

    double vocabulary_similarity(ClassId a, ClassId b) const;
    double dependency_similarity(ClassId a, ClassId b) const;
    double scs(ClassId a, ClassId b, const SemanticParams& params) const;

    const TokenCounts& vocabulary(ClassId c) const { return vocab_[c.value]; }
    std::span<const MemberId> out_neighbours(ClassId c) const { return out_[c.value]; }
    std::span<const MemberId> in_neighbours(ClassId c) const { return in_[c.value]; }

private:
    std::vector<TokenCounts> vocab_;
    std::vector<std::vector<MemberId>> out_;
    std::vector<std::vector<MemberId>> in_;
};

struct SemanticScore {
    double sem = 0;
    std::vector<double> per_op_scs;
};

/// Mean coherence over the effective ops, judged on the index's snapshot.
SemanticScore sem_of_sequence(std::span<const RefactoringOp> effective, const SemanticIndex& index,
                              const SemanticParams& params);

} // namespace refrev
