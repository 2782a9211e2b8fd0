#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace refrev {

/// Dense index into one of the model's tables. Distinct tags keep class and
/// member indices from being mixed up.
template <class Tag>
struct Index {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const Index&) const = default;
};

using ClassId = Index<struct ClassTag>;
using MemberId = Index<struct MemberTag>;

enum class Visibility : std::uint8_t { Public, Protected, Private, Package };
enum class MemberKind : std::uint8_t { Field, Method };
enum class EdgeKind : std::uint8_t { Invoke, Access };

std::string_view to_string(Visibility v);
std::string_view to_string(EdgeKind k);

struct ClassDecl {
    std::string key;
    std::string name;
    std::string file;
    bool external = false;

    bool operator==(const ClassDecl&) const = default;
};

/// Declaration of a field or a method. Methods carry a parameter list and use
/// `type` for the return type.
struct MemberDecl {
    std::string key;
    std::string name;
    MemberKind kind = MemberKind::Field;
    Visibility visibility = Visibility::Package;
    bool is_static = false;
    bool is_abstract = false;
    bool is_constructor = false;
    std::string type;
    std::vector<std::string> params;

    bool operator==(const MemberDecl&) const = default;
};

/// Immutable declarations shared by every copy of a model. Refactorings never
/// touch these; they only move members between classes and rewire superclasses.
struct Symbols {
    std::vector<ClassDecl> classes;
    std::vector<MemberDecl> members;

    std::unordered_map<std::string, ClassId> class_index;
    std::unordered_map<std::string, MemberId> member_index;

    // Interned conflict key per member: fields by name, methods by (name, params).
    std::vector<std::uint32_t> signature;
    // For fields: the internal class named by the field type, if any.
    std::vector<std::optional<ClassId>> field_type_class;
    // For methods: sorted distinct interned parameter types, and the internal
    // classes among them.
    std::vector<std::vector<std::uint32_t>> param_types;
    std::vector<std::vector<ClassId>> param_classes;
};

/// Classes, members and inheritance of one code snapshot.
///
/// The structural part (member ownership, superclass links, removed flags) is
/// a value; copying a model is cheap and the declarations are shared.
class CodeModel {
public:
    CodeModel();
    CodeModel(std::shared_ptr<const Symbols> symbols,
              std::vector<std::optional<ClassId>> superclass,
              std::vector<ClassId> owner);

    std::size_t class_count() const { return superclass_.size(); }
    std::size_t member_count() const { return owner_.size(); }

    const ClassDecl& class_decl(ClassId c) const { return symbols_->classes[c.value]; }
    const MemberDecl& member_decl(MemberId m) const { return symbols_->members[m.value]; }
    const Symbols& symbols() const { return *symbols_; }

    std::optional<ClassId> find_class(std::string_view key) const;
    std::optional<MemberId> find_member(std::string_view key) const;

    bool is_live(ClassId c) const { return c.value < removed_.size() && removed_[c.value] == 0; }
    /// Live and not an external (library) class; only these can be refactored.
    bool is_internal(ClassId c) const { return is_live(c) && !class_decl(c).external; }
    std::optional<ClassId> superclass(ClassId c) const { return superclass_[c.value]; }
    ClassId owner(MemberId m) const { return owner_[m.value]; }

    /// Live internal classes in id order.
    std::vector<ClassId> internal_classes() const;
    std::vector<MemberId> members_of(ClassId c) const;
    std::vector<std::vector<MemberId>> members_by_class() const;
    bool is_ancestor(ClassId ancestor, ClassId c) const;
    std::vector<ClassId> direct_subclasses(ClassId c) const;

    void set_owner(MemberId m, ClassId c) { owner_[m.value] = c; }
    void set_superclass(ClassId c, std::optional<ClassId> super) { superclass_[c.value] = super; }
    void remove_class(ClassId c) { removed_[c.value] = 1; }

    friend bool operator==(const CodeModel& a, const CodeModel& b);

private:
    std::shared_ptr<const Symbols> symbols_;
    std::vector<std::optional<ClassId>> superclass_;
    std::vector<std::uint8_t> removed_;
    std::vector<ClassId> owner_;
};

struct Edge {
    MemberId from;
    MemberId to;
    EdgeKind kind = EdgeKind::Invoke;

    auto operator<=>(const Edge&) const = default;
};

/// Static invoke/access relations between members. Endpoints are member ids,
/// which stay valid when members move between classes.
class CallGraph {
public:
    CallGraph() = default;
    CallGraph(std::vector<Edge> edges, std::size_t member_count);

    std::span<const Edge> edges() const { return edges_; }
    std::size_t size() const { return edges_.size(); }
    std::span<const MemberId> successors(MemberId m) const;
    std::span<const MemberId> predecessors(MemberId m) const;

    bool operator==(const CallGraph& other) const { return edges_ == other.edges_; }

private:
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> out_offset_;
    std::vector<MemberId> out_;
    std::vector<std::uint32_t> in_offset_;
    std::vector<MemberId> in_;
};

struct CodeFacts {
    CodeModel model;
    CallGraph graph;
};

CodeFacts parse_code_facts(const nlohmann::json& doc);
CodeFacts parse_code_facts(std::string_view text);
CodeFacts load_code_facts(const std::filesystem::path& path);

/// Serializes back to the facts format. Removed classes are omitted.
nlohmann::json to_json(const CodeModel& model, const CallGraph& graph);

/// File recorded for a class at ingestion. Throws UnknownIdError.
const std::string& class_file(const CodeModel& model, std::string_view class_key);

} // namespace refrev
