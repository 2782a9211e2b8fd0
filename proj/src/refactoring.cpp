#include "refrev/refactoring.hpp"

#include "refrev/errors.hpp"

namespace refrev {

std::string_view to_string(RefactoringKind k) {
    switch (k) {
    case RefactoringKind::InlineClass: return "InlineClass";
    case RefactoringKind::MoveMethod: return "MoveMethod";
    case RefactoringKind::PullUpMethod: return "PullUpMethod";
    case RefactoringKind::PushDownMethod: return "PushDownMethod";
    case RefactoringKind::MoveField: return "MoveField";
    case RefactoringKind::PullUpField: return "PullUpField";
    case RefactoringKind::PushDownField: return "PushDownField";
    case RefactoringKind::Null: return "Null";
    }
    return "Null";
}

std::optional<RefactoringKind> parse_refactoring_kind(std::string_view text) {
    for (auto k : kAllRefactoringKinds) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

std::optional<MemberKind> member_kind_of(RefactoringKind k) {
    switch (k) {
    case RefactoringKind::MoveMethod:
    case RefactoringKind::PullUpMethod:
    case RefactoringKind::PushDownMethod: return MemberKind::Method;
    case RefactoringKind::MoveField:
    case RefactoringKind::PullUpField:
    case RefactoringKind::PushDownField: return MemberKind::Field;
    default: return std::nullopt;
    }
}

int arity(RefactoringKind k) {
    if (k == RefactoringKind::Null) return 0;
    if (k == RefactoringKind::InlineClass) return 2;
    return 3;
}

namespace {

bool in_range(ClassId c, const CodeModel& model) { return c.value < model.class_count(); }

bool has_conflict(const CodeModel& model, ClassId target, std::uint32_t signature) {
    const auto& sigs = model.symbols().signature;
    for (std::uint32_t i = 0; i < model.member_count(); ++i) {
        if (model.owner(MemberId{i}) == target && sigs[i] == signature) return true;
    }
    return false;
}

bool inline_applicable(const RefactoringOp& op, const CodeModel& model) {
    if (op.source == op.target) return false;
    if (!model.is_internal(op.source) || !model.is_internal(op.target)) return false;
    if (model.is_ancestor(op.source, op.target)) return false;
    const auto& sigs = model.symbols().signature;
    for (std::uint32_t i = 0; i < model.member_count(); ++i) {
        if (model.owner(MemberId{i}) == op.source && has_conflict(model, op.target, sigs[i])) return false;
    }
    return true;
}

} // namespace

bool is_applicable(const RefactoringOp& op, const CodeModel& model) {
    if (op.kind == RefactoringKind::Null) return false;
    if (!in_range(op.source, model) || !in_range(op.target, model)) return false;
    if (op.kind == RefactoringKind::InlineClass) return inline_applicable(op, model);

    if (!op.member || op.member->value >= model.member_count()) return false;
    const MemberId m = *op.member;
    const auto& decl = model.member_decl(m);
    if (decl.kind != *member_kind_of(op.kind)) return false;
    if (op.source == op.target) return false;
    if (!model.is_internal(op.source) || !model.is_internal(op.target)) return false;
    if (model.owner(m) != op.source) return false;
    if (decl.kind == MemberKind::Method && decl.is_constructor) return false;

    switch (op.kind) {
    case RefactoringKind::MoveMethod:
        if (decl.is_abstract) return false;
        break;
    case RefactoringKind::MoveField: break;
    case RefactoringKind::PullUpMethod:
    case RefactoringKind::PullUpField:
        if (model.superclass(op.source) != op.target) return false;
        break;
    case RefactoringKind::PushDownMethod:
    case RefactoringKind::PushDownField:
        if (model.superclass(op.target) != op.source) return false;
        break;
    default: return false;
    }
    return !has_conflict(model, op.target, model.symbols().signature[m.value]);
}

bool apply_in_place(const RefactoringOp& op, CodeModel& model) {
    if (!is_applicable(op, model)) return false;
    if (op.kind == RefactoringKind::InlineClass) {
        for (std::uint32_t i = 0; i < model.member_count(); ++i) {
            if (model.owner(MemberId{i}) == op.source) model.set_owner(MemberId{i}, op.target);
        }
        const auto parent = model.superclass(op.source);
        for (auto child : model.direct_subclasses(op.source)) model.set_superclass(child, parent);
        model.remove_class(op.source);
        return true;
    }
    model.set_owner(*op.member, op.target);
    return true;
}

ApplyResult apply(const RefactoringOp& op, const CodeModel& model, const CallGraph& graph) {
    ApplyResult out{model, graph, false};
    out.applied = apply_in_place(op, out.model);
    return out;
}

SequenceResult apply_sequence(const Solution& solution, const CodeModel& model) {
    SequenceResult out{model, {}};
    for (const auto& gene : solution.genes) {
        if (apply_in_place(gene, out.model)) out.effective.push_back(gene);
    }
    return out;
}

std::optional<RefactoringOp> inverse(const RefactoringOp& op) {
    switch (op.kind) {
    case RefactoringKind::MoveMethod:
    case RefactoringKind::MoveField: return RefactoringOp{op.kind, op.target, op.source, op.member};
    case RefactoringKind::PullUpMethod:
        return RefactoringOp{RefactoringKind::PushDownMethod, op.target, op.source, op.member};
    case RefactoringKind::PullUpField:
        return RefactoringOp{RefactoringKind::PushDownField, op.target, op.source, op.member};
    case RefactoringKind::PushDownMethod:
        return RefactoringOp{RefactoringKind::PullUpMethod, op.target, op.source, op.member};
    case RefactoringKind::PushDownField:
        return RefactoringOp{RefactoringKind::PullUpField, op.target, op.source, op.member};
    default: return std::nullopt;
    }
}

nlohmann::json to_json(const RefactoringOp& op, const CodeModel& model) {
    nlohmann::json j{{"kind", to_string(op.kind)}};
    if (op.kind == RefactoringKind::Null) return j;
    j["class1"] = model.class_decl(op.source).key;
    j["class2"] = model.class_decl(op.target).key;
    if (op.member) j["member"] = model.member_decl(*op.member).key;
    return j;
}

RefactoringOp op_from_json(const nlohmann::json& j, const CodeModel& model) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ParseError("refactoring: expected an object with a string 'kind'");
    }
    const auto kind = parse_refactoring_kind(j["kind"].get<std::string>());
    if (!kind) throw ParseError("refactoring: unknown kind '" + j["kind"].get<std::string>() + "'");
    if (*kind == RefactoringKind::Null) return RefactoringOp::null();

    auto class_param = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw ParseError(std::string("refactoring: missing '") + key + "'");
        }
        const auto text = j[key].get<std::string>();
        auto id = model.find_class(text);
        if (!id) throw UnknownIdError("refactoring: unknown class id '" + text + "'");
        return *id;
    };
    RefactoringOp op{*kind, class_param("class1"), class_param("class2"), std::nullopt};
    if (member_kind_of(*kind)) {
        if (!j.contains("member") || !j["member"].is_string()) throw ParseError("refactoring: missing 'member'");
        const auto text = j["member"].get<std::string>();
        auto id = model.find_member(text);
        if (!id) throw UnknownIdError("refactoring: unknown member id '" + text + "'");
        op.member = *id;
    }
    return op;
}

std::string describe(const RefactoringOp& op, const CodeModel& model) {
    std::string out(to_string(op.kind));
    if (op.kind == RefactoringKind::Null) return out;
    out += "(" + model.class_decl(op.source).key + ", " + model.class_decl(op.target).key;
    if (op.member) out += ", " + model.member_decl(*op.member).key;
    return out + ")";
}

} // namespace refrev
