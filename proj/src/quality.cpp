#include "refrev/quality.hpp"

#include <algorithm>
#include <unordered_set>

namespace refrev {

DesignMetrics DesignMetrics::from_array(const std::array<double, 11>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9], a[10]};
}

DesignMetrics compute_metrics(const CodeModel& model, const CallGraph& graph) {
    const auto internal = model.internal_classes();
    if (internal.empty()) return {};
    const auto& sym = model.symbols();
    const auto members = model.members_by_class();

    std::vector<std::uint32_t> internal_children(model.class_count(), 0);
    for (auto c : internal) {
        if (auto s = model.superclass(c); s && model.is_internal(*s)) ++internal_children[s->value];
    }

    DesignMetrics sum;
    std::vector<std::uint32_t> coupled;
    std::vector<std::uint32_t> types;
    std::unordered_set<std::uint32_t> seen_signatures;

    for (auto c : internal) {
        const auto& own = members[c.value];

        // Hierarchies are counted at their internal root.
        const auto parent = model.superclass(c);
        if ((!parent || !model.is_internal(*parent)) && internal_children[c.value] > 0) sum.noh += 1;

        double ancestors = 0;
        for (auto a = parent; a; a = model.superclass(*a)) ancestors += 1;
        sum.ana += ancestors;

        std::size_t n_fields = 0, hidden_fields = 0, aggregated = 0;
        std::size_t n_methods = 0, public_methods = 0, abstract_methods = 0;
        std::size_t param_type_sum = 0;
        coupled.clear();
        types.clear();
        seen_signatures.clear();

        auto couple = [&](ClassId other) {
            if (other != c && model.is_internal(other)) coupled.push_back(other.value);
        };

        for (auto m : own) {
            const auto& d = model.member_decl(m);
            if (d.kind == MemberKind::Field) {
                ++n_fields;
                if (d.visibility == Visibility::Private || d.visibility == Visibility::Protected) ++hidden_fields;
                if (auto t = sym.field_type_class[m.value]; t && model.is_internal(*t)) {
                    ++aggregated;
                    couple(*t);
                }
            } else {
                ++n_methods;
                if (d.visibility == Visibility::Public) ++public_methods;
                if (d.is_abstract) ++abstract_methods;
                const auto& pt = sym.param_types[m.value];
                param_type_sum += pt.size();
                types.insert(types.end(), pt.begin(), pt.end());
                for (auto pc : sym.param_classes[m.value]) couple(pc);
                seen_signatures.insert(sym.signature[m.value]);
            }
            for (auto target : graph.successors(m)) couple(model.owner(target));
        }

        std::sort(coupled.begin(), coupled.end());
        sum.dcc += static_cast<double>(std::unique(coupled.begin(), coupled.end()) - coupled.begin());

        if (n_fields > 0) sum.dam += static_cast<double>(hidden_fields) / static_cast<double>(n_fields);
        sum.moa += static_cast<double>(aggregated);

        std::sort(types.begin(), types.end());
        const auto distinct_types = static_cast<std::size_t>(std::unique(types.begin(), types.end()) - types.begin());
        if (n_methods > 0 && distinct_types > 0) {
            sum.cam += static_cast<double>(param_type_sum) /
                       (static_cast<double>(distinct_types) * static_cast<double>(n_methods));
        }

        // Inherited, non-overridden methods visible from ancestors.
        std::size_t inherited = 0;
        for (auto a = parent; a; a = model.superclass(*a)) {
            for (auto m : members[a->value]) {
                const auto& d = model.member_decl(m);
                if (d.kind != MemberKind::Method || d.is_constructor || d.visibility == Visibility::Private) continue;
                if (seen_signatures.insert(sym.signature[m.value]).second) ++inherited;
            }
        }
        if (inherited + n_methods > 0) {
            sum.mfa += static_cast<double>(inherited) / static_cast<double>(inherited + n_methods);
        }

        sum.nop += static_cast<double>(abstract_methods);
        sum.cis += static_cast<double>(public_methods);
        sum.nom += static_cast<double>(n_methods);
    }

    const double n = static_cast<double>(internal.size());
    DesignMetrics out;
    out.dsc = n;
    out.noh = sum.noh;
    out.ana = sum.ana / n;
    out.dam = sum.dam / n;
    out.dcc = sum.dcc / n;
    out.cam = sum.cam / n;
    out.moa = sum.moa / n;
    out.mfa = sum.mfa / n;
    out.nop = sum.nop / n;
    out.cis = sum.cis / n;
    out.nom = sum.nom / n;
    return out;
}

QualityVector compute_attributes(const DesignMetrics& m) {
    // Design properties: size=DSC, hierarchies=NOH, abstraction=ANA,
    // encapsulation=DAM, coupling=DCC, cohesion=CAM, composition=MOA,
    // inheritance=MFA, polymorphism=NOP, messaging=CIS, complexity=NOM.
    QualityVector q;
    q.reusability = -0.25 * m.dcc + 0.25 * m.cam + 0.5 * m.cis + 0.5 * m.dsc;
    q.flexibility = 0.25 * m.dam - 0.25 * m.dcc + 0.5 * m.moa + 0.5 * m.nop;
    q.understandability =
        -0.33 * m.ana + 0.33 * m.dam - 0.33 * m.dcc + 0.33 * m.cam - 0.33 * m.nop - 0.33 * m.nom - 0.33 * m.dsc;
    q.functionality = 0.12 * m.cam + 0.22 * m.nop + 0.22 * m.cis + 0.22 * m.dsc + 0.22 * m.noh;
    q.extendibility = 0.5 * m.ana - 0.5 * m.dcc + 0.5 * m.mfa + 0.5 * m.nop;
    q.effectiveness = 0.2 * m.ana + 0.2 * m.dam + 0.2 * m.moa + 0.2 * m.mfa + 0.2 * m.nop;
    return q;
}

double quality_delta(const QualityVector& before, const QualityVector& after) {
    const auto b = before.as_array();
    const auto a = after.as_array();
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) total += a[i] - b[i];
    return total;
}

double quality_gain(const CodeModel& model, const CallGraph& graph, const Solution& solution) {
    const auto before = compute_attributes(compute_metrics(model, graph));
    const auto after = compute_attributes(compute_metrics(apply_sequence(solution, model).model, graph));
    return quality_delta(before, after);
}

} // namespace refrev
