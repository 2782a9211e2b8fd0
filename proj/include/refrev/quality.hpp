#pragma once

#include <array>

#include "refrev/code_model.hpp"
#include "refrev/refactoring.hpp"

namespace refrev {

/// The eleven QMOOD design metrics. DSC and NOH are design-wide counts; the
/// rest are per-class values averaged over live internal classes.
struct DesignMetrics {
    double dsc = 0;  // design size in classes
    double noh = 0;  // number of hierarchies
    double ana = 0;  // average number of ancestors
    double dam = 0;  // data access metric
    double dcc = 0;  // direct class coupling
    double cam = 0;  // cohesion among methods
    double moa = 0;  // measure of aggregation
    double mfa = 0;  // measure of functional abstraction
    double nop = 0;  // number of polymorphic methods
    double cis = 0;  // class interface size
    double nom = 0;  // number of methods

    std::array<double, 11> as_array() const { return {dsc, noh, ana, dam, dcc, cam, moa, mfa, nop, cis, nom}; }
    static DesignMetrics from_array(const std::array<double, 11>& a);
    bool operator==(const DesignMetrics&) const = default;
};

struct QualityVector {
    double reusability = 0;
    double flexibility = 0;
    double understandability = 0;
    double functionality = 0;
    double extendibility = 0;
    double effectiveness = 0;

    std::array<double, 6> as_array() const {
        return {reusability, flexibility, understandability, functionality, extendibility, effectiveness};
    }
    bool operator==(const QualityVector&) const = default;
};

inline constexpr std::array<const char*, 6> kQualityAttributeNames = {
    "reusability", "flexibility", "understandability", "functionality", "extendibility", "effectiveness"};

DesignMetrics compute_metrics(const CodeModel& model, const CallGraph& graph);

/// QMOOD attribute weights applied to the design properties.
QualityVector compute_attributes(const DesignMetrics& m);

/// Sum over the six attributes of (after - before).
double quality_delta(const QualityVector& before, const QualityVector& after);

/// Quality gain of applying `solution` to `model`.
double quality_gain(const CodeModel& model, const CallGraph& graph, const Solution& solution);

} // namespace refrev
