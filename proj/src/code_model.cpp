#include "refrev/code_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "refrev/errors.hpp"

namespace refrev {

using nlohmann::json;

std::string_view to_string(Visibility v) {
    switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Private: return "private";
    case Visibility::Package: return "package";
    }
    return "package";
}

std::string_view to_string(EdgeKind k) {
    return k == EdgeKind::Invoke ? "invoke" : "access";
}

// ---------------------------------------------------------------------------
// CodeModel

CodeModel::CodeModel() : symbols_(std::make_shared<const Symbols>()) {}

CodeModel::CodeModel(std::shared_ptr<const Symbols> symbols,
                     std::vector<std::optional<ClassId>> superclass,
                     std::vector<ClassId> owner)
    : symbols_(std::move(symbols)),
      superclass_(std::move(superclass)),
      removed_(superclass_.size(), 0),
      owner_(std::move(owner)) {}

std::optional<ClassId> CodeModel::find_class(std::string_view key) const {
    auto it = symbols_->class_index.find(std::string(key));
    if (it == symbols_->class_index.end()) return std::nullopt;
    return it->second;
}

std::optional<MemberId> CodeModel::find_member(std::string_view key) const {
    auto it = symbols_->member_index.find(std::string(key));
    if (it == symbols_->member_index.end()) return std::nullopt;
    return it->second;
}

std::vector<ClassId> CodeModel::internal_classes() const {
    std::vector<ClassId> out;
    for (std::uint32_t i = 0; i < class_count(); ++i) {
        if (is_internal(ClassId{i})) out.push_back(ClassId{i});
    }
    return out;
}

std::vector<MemberId> CodeModel::members_of(ClassId c) const {
    std::vector<MemberId> out;
    for (std::uint32_t i = 0; i < owner_.size(); ++i) {
        if (owner_[i] == c) out.push_back(MemberId{i});
    }
    return out;
}

std::vector<std::vector<MemberId>> CodeModel::members_by_class() const {
    std::vector<std::vector<MemberId>> out(class_count());
    for (std::uint32_t i = 0; i < owner_.size(); ++i) {
        out[owner_[i].value].push_back(MemberId{i});
    }
    return out;
}

bool CodeModel::is_ancestor(ClassId ancestor, ClassId c) const {
    // Acyclicity is an invariant, but bound the walk anyway.
    auto cur = superclass(c);
    for (std::size_t steps = 0; cur && steps < class_count(); ++steps) {
        if (*cur == ancestor) return true;
        cur = superclass(*cur);
    }
    return false;
}

std::vector<ClassId> CodeModel::direct_subclasses(ClassId c) const {
    std::vector<ClassId> out;
    for (std::uint32_t i = 0; i < class_count(); ++i) {
        if (is_live(ClassId{i}) && superclass_[i] == c) out.push_back(ClassId{i});
    }
    return out;
}

bool operator==(const CodeModel& a, const CodeModel& b) {
    if (a.superclass_ != b.superclass_ || a.removed_ != b.removed_ || a.owner_ != b.owner_) {
        return false;
    }
    if (a.symbols_ == b.symbols_) return true;
    return a.symbols_->classes == b.symbols_->classes && a.symbols_->members == b.symbols_->members;
}

const std::string& class_file(const CodeModel& model, std::string_view class_key) {
    auto id = model.find_class(class_key);
    if (!id) throw UnknownIdError("unknown class id '" + std::string(class_key) + "'");
    return model.class_decl(*id).file;
}

// ---------------------------------------------------------------------------
// CallGraph

CallGraph::CallGraph(std::vector<Edge> edges, std::size_t member_count) : edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    auto build = [&](bool outgoing, std::vector<std::uint32_t>& offset, std::vector<MemberId>& adj) {
        offset.assign(member_count + 1, 0);
        for (const auto& e : edges_) ++offset[(outgoing ? e.from : e.to).value + 1];
        for (std::size_t i = 0; i < member_count; ++i) offset[i + 1] += offset[i];
        adj.assign(edges_.size(), MemberId{});
        auto cursor = offset;
        for (const auto& e : edges_) {
            auto src = outgoing ? e.from : e.to;
            adj[cursor[src.value]++] = outgoing ? e.to : e.from;
        }
        // Invoke and access edges between the same pair collapse to one neighbour.
        std::vector<MemberId> compact;
        std::vector<std::uint32_t> compact_offset(member_count + 1, 0);
        for (std::size_t i = 0; i < member_count; ++i) {
            auto first = adj.begin() + offset[i];
            auto last = adj.begin() + offset[i + 1];
            std::sort(first, last);
            auto end = std::unique(first, last);
            compact.insert(compact.end(), first, end);
            compact_offset[i + 1] = static_cast<std::uint32_t>(compact.size());
        }
        offset = std::move(compact_offset);
        adj = std::move(compact);
    };
    build(true, out_offset_, out_);
    build(false, in_offset_, in_);
}

std::span<const MemberId> CallGraph::successors(MemberId m) const {
    if (m.value + 1 >= out_offset_.size()) return {};
    return std::span<const MemberId>(out_).subspan(out_offset_[m.value],
                                                   out_offset_[m.value + 1] - out_offset_[m.value]);
}

std::span<const MemberId> CallGraph::predecessors(MemberId m) const {
    if (m.value + 1 >= in_offset_.size()) return {};
    return std::span<const MemberId>(in_).subspan(in_offset_[m.value],
                                                  in_offset_[m.value + 1] - in_offset_[m.value]);
}

// ---------------------------------------------------------------------------
// Facts parsing

namespace {

template <class T>
T required(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": key '" + key + "' has the wrong type");
    }
}

json array_value(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return json::array();
    if (!it->is_array()) throw ParseError(where + ": key '" + key + "' must be an array");
    return *it;
}

template <class T>
T optional_value(const json& obj, const char* key, T fallback, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": key '" + key + "' has the wrong type");
    }
}

Visibility parse_visibility(const std::string& text, const std::string& where) {
    if (text == "public") return Visibility::Public;
    if (text == "protected") return Visibility::Protected;
    if (text == "private") return Visibility::Private;
    if (text == "package") return Visibility::Package;
    throw ParseError(where + ": unknown visibility '" + text + "'");
}

class Interner {
public:
    std::uint32_t operator()(const std::string& s) {
        auto [it, inserted] = ids_.try_emplace(s, static_cast<std::uint32_t>(ids_.size()));
        return it->second;
    }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
};

std::string signature_text(const MemberDecl& m) {
    if (m.kind == MemberKind::Field) return "f:" + m.name;
    std::string out = "m:" + m.name + "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) out += ',';
        out += m.params[i];
    }
    return out + ")";
}

} // namespace

CodeFacts parse_code_facts(const json& doc) {
    if (!doc.is_object()) throw ParseError("facts: top level must be an object");
    auto classes_it = doc.find("classes");
    if (classes_it == doc.end() || !classes_it->is_array()) {
        throw ParseError("facts: 'classes' must be an array");
    }

    auto symbols = std::make_shared<Symbols>();
    std::vector<std::optional<std::string>> super_keys;
    std::vector<ClassId> owner;

    for (const auto& cls : *classes_it) {
        if (!cls.is_object()) throw ParseError("facts: class entries must be objects");
        ClassDecl decl;
        decl.key = required<std::string>(cls, "id", "class");
        const std::string where = "class '" + decl.key + "'";
        decl.name = optional_value<std::string>(cls, "name", decl.key, where);
        decl.file = optional_value<std::string>(cls, "file", "", where);
        decl.external = optional_value<bool>(cls, "external", false, where);
        if (!decl.external && decl.file.empty()) throw ParseError(where + ": missing key 'file'");

        const ClassId id{static_cast<std::uint32_t>(symbols->classes.size())};
        if (!symbols->class_index.emplace(decl.key, id).second) {
            throw ValidationError("duplicate class id '" + decl.key + "'");
        }
        super_keys.push_back((cls.contains("superclass") && !cls["superclass"].is_null()
                                  ? std::optional<std::string>(required<std::string>(cls, "superclass", where))
                                  : std::nullopt));

        auto add_member = [&](MemberDecl m) {
            if (!symbols->member_index.emplace(m.key, MemberId{static_cast<std::uint32_t>(symbols->members.size())})
                     .second) {
                throw ValidationError("duplicate member id '" + m.key + "'");
            }
            symbols->members.push_back(std::move(m));
            owner.push_back(id);
        };

        for (const auto& f : array_value(cls, "fields", where)) {
            MemberDecl m;
            m.kind = MemberKind::Field;
            m.key = required<std::string>(f, "id", where + " field");
            const std::string fwhere = "field '" + m.key + "'";
            m.name = required<std::string>(f, "name", fwhere);
            m.type = optional_value<std::string>(f, "type", "", fwhere);
            m.visibility = parse_visibility(optional_value<std::string>(f, "visibility", "package", fwhere), fwhere);
            m.is_static = optional_value<bool>(f, "static", false, fwhere);
            add_member(std::move(m));
        }
        for (const auto& f : array_value(cls, "methods", where)) {
            MemberDecl m;
            m.kind = MemberKind::Method;
            m.key = required<std::string>(f, "id", where + " method");
            const std::string mwhere = "method '" + m.key + "'";
            m.name = required<std::string>(f, "name", mwhere);
            m.params = optional_value<std::vector<std::string>>(f, "params", {}, mwhere);
            m.type = optional_value<std::string>(f, "returns", "void", mwhere);
            m.visibility = parse_visibility(optional_value<std::string>(f, "visibility", "package", mwhere), mwhere);
            m.is_static = optional_value<bool>(f, "static", false, mwhere);
            m.is_abstract = optional_value<bool>(f, "abstract", false, mwhere);
            m.is_constructor = optional_value<bool>(f, "constructor", false, mwhere);
            add_member(std::move(m));
        }
        symbols->classes.push_back(std::move(decl));
    }

    const std::size_t n_classes = symbols->classes.size();
    const std::size_t n_members = symbols->members.size();

    // Superclass resolution.
    std::vector<std::optional<ClassId>> superclass(n_classes);
    for (std::size_t i = 0; i < n_classes; ++i) {
        if (!super_keys[i]) continue;
        auto it = symbols->class_index.find(*super_keys[i]);
        if (it == symbols->class_index.end()) {
            throw ValidationError("class '" + symbols->classes[i].key + "': dangling superclass id '" +
                                  *super_keys[i] + "'");
        }
        superclass[i] = it->second;
    }

    // Acyclicity by topological sort over child -> parent links.
    {
        std::vector<std::uint32_t> child_count(n_classes, 0);
        for (const auto& s : superclass) {
            if (s) ++child_count[s->value];
        }
        std::vector<std::uint32_t> ready;
        for (std::uint32_t i = 0; i < n_classes; ++i) {
            if (child_count[i] == 0) ready.push_back(i);
        }
        std::size_t visited = 0;
        while (!ready.empty()) {
            auto c = ready.back();
            ready.pop_back();
            ++visited;
            if (auto s = superclass[c]; s && --child_count[s->value] == 0) ready.push_back(s->value);
        }
        if (visited != n_classes) {
            std::string first;
            for (std::uint32_t i = 0; i < n_classes; ++i) {
                if (child_count[i] != 0 && (first.empty() || symbols->classes[i].key < first)) {
                    first = symbols->classes[i].key;
                }
            }
            throw ValidationError("inheritance cycle involving class '" + first + "'");
        }
    }

    // Derived symbol tables.
    Interner signature_ids;
    Interner type_ids;
    std::unordered_map<std::string, ClassId> type_lookup;
    for (std::uint32_t i = 0; i < n_classes; ++i) {
        if (!symbols->classes[i].external) type_lookup.emplace(symbols->classes[i].key, ClassId{i});
    }
    for (std::uint32_t i = 0; i < n_classes; ++i) {
        if (!symbols->classes[i].external) type_lookup.emplace(symbols->classes[i].name, ClassId{i});
    }
    auto resolve_type = [&](const std::string& t) -> std::optional<ClassId> {
        auto it = type_lookup.find(t);
        if (it == type_lookup.end()) return std::nullopt;
        return it->second;
    };

    symbols->signature.resize(n_members);
    symbols->field_type_class.resize(n_members);
    symbols->param_types.resize(n_members);
    symbols->param_classes.resize(n_members);
    for (std::size_t i = 0; i < n_members; ++i) {
        const auto& m = symbols->members[i];
        symbols->signature[i] = signature_ids(signature_text(m));
        if (m.kind == MemberKind::Field) {
            symbols->field_type_class[i] = resolve_type(m.type);
            continue;
        }
        auto& types = symbols->param_types[i];
        for (const auto& p : m.params) types.push_back(type_ids(p));
        std::sort(types.begin(), types.end());
        types.erase(std::unique(types.begin(), types.end()), types.end());
        auto& classes = symbols->param_classes[i];
        for (const auto& p : m.params) {
            if (auto c = resolve_type(p)) classes.push_back(*c);
        }
        std::sort(classes.begin(), classes.end());
        classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    }

    // Per-class member uniqueness.
    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> seen;  // (class, signature)
        seen.reserve(n_members);
        for (std::size_t i = 0; i < n_members; ++i) seen.emplace_back(owner[i].value, symbols->signature[i]);
        std::vector<std::size_t> order(n_members);
        for (std::size_t i = 0; i < n_members; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return seen[a] < seen[b]; });
        for (std::size_t k = 1; k < order.size(); ++k) {
            if (seen[order[k]] == seen[order[k - 1]]) {
                const auto& m = symbols->members[order[k]];
                const auto& c = symbols->classes[owner[order[k]].value];
                throw ValidationError("class '" + c.key + "': duplicate " +
                                      (m.kind == MemberKind::Field ? "field name" : "method signature") +
                                      " at member '" + m.key + "'");
            }
        }
    }

    // Edges.
    std::vector<Edge> edges;
    if (auto edges_it = doc.find("edges"); edges_it != doc.end()) {
        if (!edges_it->is_array()) throw ParseError("facts: 'edges' must be an array");
        for (const auto& e : *edges_it) {
            if (!e.is_object()) throw ParseError("facts: edge entries must be objects");
            const auto from = required<std::string>(e, "from", "edge");
            const auto to = required<std::string>(e, "to", "edge");
            const auto kind_text = required<std::string>(e, "kind", "edge " + from + "->" + to);
            EdgeKind kind;
            if (kind_text == "invoke") {
                kind = EdgeKind::Invoke;
            } else if (kind_text == "access") {
                kind = EdgeKind::Access;
            } else {
                throw ParseError("edge " + from + "->" + to + ": unknown kind '" + kind_text + "'");
            }
            auto f = symbols->member_index.find(from);
            if (f == symbols->member_index.end()) throw ValidationError("edge: dangling member id '" + from + "'");
            auto t = symbols->member_index.find(to);
            if (t == symbols->member_index.end()) throw ValidationError("edge: dangling member id '" + to + "'");
            const auto target_kind = symbols->members[t->second.value].kind;
            if (kind == EdgeKind::Invoke && target_kind != MemberKind::Method) {
                throw ValidationError("edge " + from + "->" + to + ": invoke edge must target a method");
            }
            if (kind == EdgeKind::Access && target_kind != MemberKind::Field) {
                throw ValidationError("edge " + from + "->" + to + ": access edge must target a field");
            }
            edges.push_back(Edge{f->second, t->second, kind});
        }
    }

    CodeModel model(std::move(symbols), std::move(superclass), std::move(owner));
    CallGraph graph(std::move(edges), n_members);
    return CodeFacts{std::move(model), std::move(graph)};
}

CodeFacts parse_code_facts(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("facts: malformed JSON: ") + e.what());
    }
    return parse_code_facts(doc);
}

CodeFacts load_code_facts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open facts file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_code_facts(std::string_view(buf.str()));
    } catch (const InputError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

json to_json(const CodeModel& model, const CallGraph& graph) {
    const auto members = model.members_by_class();
    json classes = json::array();
    for (std::uint32_t i = 0; i < model.class_count(); ++i) {
        const ClassId c{i};
        if (!model.is_live(c)) continue;
        const auto& decl = model.class_decl(c);
        json cls = {{"id", decl.key}, {"name", decl.name}, {"file", decl.file}, {"external", decl.external}};
        cls["superclass"] = model.superclass(c) ? json(model.class_decl(*model.superclass(c)).key) : json(nullptr);
        json fields = json::array();
        json methods = json::array();
        for (auto m : members[i]) {
            const auto& d = model.member_decl(m);
            if (d.kind == MemberKind::Field) {
                fields.push_back({{"id", d.key},
                                  {"name", d.name},
                                  {"type", d.type},
                                  {"visibility", to_string(d.visibility)},
                                  {"static", d.is_static}});
            } else {
                methods.push_back({{"id", d.key},
                                   {"name", d.name},
                                   {"params", d.params},
                                   {"returns", d.type},
                                   {"visibility", to_string(d.visibility)},
                                   {"static", d.is_static},
                                   {"abstract", d.is_abstract},
                                   {"constructor", d.is_constructor}});
            }
        }
        cls["fields"] = std::move(fields);
        cls["methods"] = std::move(methods);
        classes.push_back(std::move(cls));
    }
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back({{"from", model.member_decl(e.from).key},
                         {"to", model.member_decl(e.to).key},
                         {"kind", to_string(e.kind)}});
    }
    return json{{"classes", std::move(classes)}, {"edges", std::move(edges)}};
}

} // namespace refrev
