#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "systems.hpp"

namespace ifsarc {

/// An expected value and how it is known: "exact" for closed forms and constructions, "computed" for values
/// established by running the library and kept as regression targets.
template <class T>
struct Expected {
    T value;
    std::string basis;
};

struct GalleryEntry {
    std::string name;
    std::string description;
    std::function<IfsPath()> make;
    Expected<double> dimension;
    Expected<Verdict> arc;       // pipeline top-level verdict
    Expected<Verdict> theorem14;
    Expected<Verdict> cone;      // ERROR when the apex is degenerate
};

inline const std::vector<GalleryEntry>& gallery() {
    namespace sys = systems;
    const double log43 = std::log(4.0) / std::log(3.0);
    static const std::vector<GalleryEntry> entries{
        {"koch", "Koch curve, four maps of ratio 1/3", sys::koch, {log43, "exact"}, {Verdict::CertifiedArc, "computed"}, {Verdict::Pass, "exact"},
         {Verdict::Pass, "computed"}},
        {"twisted_koch", "four maps of ratio 1/3 rotated by ±arccos(3/4)", sys::twisted_koch, {log43, "exact"}, {Verdict::CertifiedArc, "computed"},
         {Verdict::Pass, "exact"}, {Verdict::Fail, "computed"}},
        {"sab_quarter", "Koch-type curve with end ratio 1/4 and middle ratio solving the Moran equation for log 4/log 3", sys::sab_quarter,
         {log43, "exact"}, {Verdict::CertifiedArc, "computed"}, {Verdict::Pass, "exact"}, {Verdict::Pass, "computed"}},
        {"sab_two_fifths", "Koch-type curve with end ratio 2/5 and middle ratio solving the Moran equation for log 4/log 3", sys::sab_two_fifths,
         {log43, "exact"}, {Verdict::CertifiedArc, "computed"}, {Verdict::Pass, "exact"}, {Verdict::Pass, "computed"}},
        {"gasket", "Sierpinski gasket traced by three half-size copies", sys::gasket, {std::log(3.0) / std::log(2.0), "exact"},
         {Verdict::NonArcWitness, "computed"}, {Verdict::Pass, "exact"}, {Verdict::Pass, "computed"}},
        {"carpet", "square-filling path of nine copies of ratio 1/3", sys::carpet, {2.0, "exact"}, {Verdict::NonArcWitness, "computed"},
         {Verdict::Pass, "exact"}, {Verdict::Error, "computed"}},
        {"interval", "unit interval as two halves", sys::interval, {1.0, "exact"}, {Verdict::CertifiedArc, "exact"}, {Verdict::Pass, "exact"},
         {Verdict::Pass, "exact"}},
        {"interval_thirds", "unit interval as three thirds", sys::interval_thirds, {1.0, "exact"}, {Verdict::CertifiedArc, "exact"},
         {Verdict::Pass, "exact"}, {Verdict::Pass, "exact"}},
        {"hairpin", "arc with end ratios 1/5 and 1/6 and a thin hairpin in the middle", sys::hairpin, {1.1174323, "computed"},
         {Verdict::CertifiedArc, "computed"}, {Verdict::Fail, "exact"}, {Verdict::Fail, "computed"}},
        {"irrational_spiral", "three maps whose end angles differ by one radian; not an arc", sys::irrational_spiral, {1.2604, "computed"},
         {Verdict::NonArcWitness, "computed"}, {Verdict::Fail, "exact"}, {Verdict::Fail, "computed"}},
    };
    return entries;
}

inline const GalleryEntry& gallery_entry(const std::string& name) {
    for (const auto& e : gallery())
        if (e.name == name) return e;
    throw InvalidInput("no gallery entry named '" + name + "'");
}

/// Compares a pipeline report with the entry's expectations; returns one line per mismatch.
inline std::vector<std::string> check_expectations(const GalleryEntry& e, const AnalysisReport& pipeline) {
    std::vector<std::string> bad;
    auto child = [&](const std::string& name) -> const AnalysisReport* {
        for (const auto& c : pipeline.children)
            if (c.name == name) return &c;
        return nullptr;
    };
    const double tol = e.dimension.basis == "exact" ? 1e-12 : 1e-4;
    if (const auto* d = child("dimension"); !d || std::abs(d->real("s") - e.dimension.value) > tol) bad.push_back("dimension");
    if (pipeline.verdict != e.arc.value) bad.push_back("arc verdict " + std::string(to_string(pipeline.verdict)));
    if (const auto* t = child("theorem14"); !t || t->verdict != e.theorem14.value) bad.push_back("theorem14");
    if (const auto* c = child("cone_containment"); !c || c->verdict != e.cone.value) bad.push_back("cone_containment");
    return bad;
}

}  // namespace ifsarc
