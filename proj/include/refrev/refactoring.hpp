#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refrev/code_model.hpp"

namespace refrev {

/// The seven design-level refactorings plus Null, in their canonical index order.
enum class RefactoringKind : std::uint8_t {
    InlineClass,
    MoveMethod,
    PullUpMethod,
    PushDownMethod,
    MoveField,
    PullUpField,
    PushDownField,
    Null,
};

inline constexpr std::array<RefactoringKind, 8> kAllRefactoringKinds = {
    RefactoringKind::InlineClass, RefactoringKind::MoveMethod,    RefactoringKind::PullUpMethod,
    RefactoringKind::PushDownMethod, RefactoringKind::MoveField,  RefactoringKind::PullUpField,
    RefactoringKind::PushDownField, RefactoringKind::Null,
};

std::string_view to_string(RefactoringKind k);
std::optional<RefactoringKind> parse_refactoring_kind(std::string_view text);

/// Which member table a kind's third parameter is drawn from; nullopt for
/// InlineClass and Null.
std::optional<MemberKind> member_kind_of(RefactoringKind k);

/// Number of parameters (classes + member) carried by a kind.
int arity(RefactoringKind k);

/// One gene. Parameters refer to the original model's ids and may go stale as
/// earlier genes in a sequence are applied.
struct RefactoringOp {
    RefactoringKind kind = RefactoringKind::Null;
    ClassId source{};
    ClassId target{};
    std::optional<MemberId> member;

    static RefactoringOp null() { return {}; }
    static RefactoringOp inline_class(ClassId from, ClassId into) {
        return {RefactoringKind::InlineClass, from, into, std::nullopt};
    }
    static RefactoringOp with_member(RefactoringKind k, ClassId from, ClassId to, MemberId m) {
        return {k, from, to, m};
    }

    bool operator==(const RefactoringOp&) const = default;
};

/// An ordered, fixed-length refactoring sequence. Gene order is application order.
struct Solution {
    std::vector<RefactoringOp> genes;
    /// Genes that applied at the last evaluation.
    std::size_t effective_count = 0;

    bool operator==(const Solution& other) const { return genes == other.genes; }
};

/// Kind-specific preconditions against the current model state. Dangling or
/// stale references yield false.
bool is_applicable(const RefactoringOp& op, const CodeModel& model);

/// Applies `op` to `model` if applicable; returns whether it did.
bool apply_in_place(const RefactoringOp& op, CodeModel& model);

struct ApplyResult {
    CodeModel model;
    CallGraph graph;
    bool applied = false;
};

/// Side-effect free application. Member ids are stable across moves, so the
/// returned graph equals the input graph with endpoints re-homed implicitly.
ApplyResult apply(const RefactoringOp& op, const CodeModel& model, const CallGraph& graph);

struct SequenceResult {
    CodeModel model;
    std::vector<RefactoringOp> effective;
};

/// Applies genes left to right; each gene is checked against the state left
/// by its predecessors. Inapplicable genes act as Null.
SequenceResult apply_sequence(const Solution& solution, const CodeModel& model);

/// The op that undoes `op` on the model it was applied to, when one exists
/// (moves reverse, pull-up and push-down swap). InlineClass and Null have none.
std::optional<RefactoringOp> inverse(const RefactoringOp& op);

nlohmann::json to_json(const RefactoringOp& op, const CodeModel& model);
/// Throws ParseError / UnknownIdError.
RefactoringOp op_from_json(const nlohmann::json& j, const CodeModel& model);
std::string describe(const RefactoringOp& op, const CodeModel& model);

} // namespace refrev
