#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifs_path.hpp"
#include "report.hpp"

namespace ifsarc {

/// Outcome of an (a, b) exponent search: PASS carries the smallest witness found.
struct ExponentSearch {
    Verdict verdict = Verdict::Undecided;
    Provenance provenance = Provenance::Exact;
    std::optional<std::pair<std::int64_t, std::int64_t>> witness;
};

/// Smallest (t, s) with r^t = ρ^s, 1 ≤ t, s ≤ bound. Exact ratios are compared exactly, so a miss is a FAIL
/// within the bound; approximate ratios are compared within 1e-12 in log scale and a miss is UNDECIDED.
inline ExponentSearch commensurable_ratios(const Scalar& r, const Scalar& rho, int bound) {
    ExponentSearch out;
    if (r.is_exact() && rho.is_exact() && r.rational() == rho.rational()) {
        out.verdict = Verdict::Pass;
        out.witness = {1, 1};
        return out;
    }
    const double lr = std::log(r.to_double()), lrho = std::log(rho.to_double());
    const bool exact = r.is_exact() && rho.is_exact();
    for (std::int64_t t = 1; t <= bound; ++t)
        for (std::int64_t s = 1; s <= bound; ++s) {
            const double gap = std::abs(static_cast<double>(t) * lr - static_cast<double>(s) * lrho);
            if (exact) {
                if (gap > 1e-6 * std::abs(static_cast<double>(t) * lr)) continue;
                if (rational_pow(r.rational(), static_cast<unsigned>(t)) != rational_pow(rho.rational(), static_cast<unsigned>(s))) continue;
                out.verdict = Verdict::Pass;
                out.witness = {t, s};
                return out;
            }
            if (gap <= 1e-12 * std::max(1.0, std::abs(static_cast<double>(t) * lr))) {
                out.verdict = Verdict::Pass;
                out.provenance = Provenance::Numeric;
                out.witness = {t, s};
                return out;
            }
        }
    out.verdict = exact ? Verdict::Fail : Verdict::Undecided;
    out.provenance = exact ? Provenance::Exact : Provenance::Numeric;
    return out;
}

/// Smallest (q, p) with A^q = B^p. Planar parts are compared by exact dihedral arithmetic on their formal
/// angles: a formal match is a PASS, two exact angles that never match are a FAIL within the bound, and
/// numeric near-matches of opaque angles stay UNDECIDED. Matrices with approximate entries pass numerically.
inline ExponentSearch commensurable_orthogonal(const OrthogonalPart& a, const OrthogonalPart& b, int bound) {
    ExponentSearch out;
    const bool planar = std::holds_alternative<PlanarOrthogonal>(a);
    bool any_unknown = false;
    for (std::int64_t q = 1; q <= bound; ++q) {
        const OrthogonalPart aq = power(a, q);
        for (std::int64_t p = 1; p <= bound; ++p) {
            const Tri t = equals(aq, power(b, p));
            if (t == Tri::Yes) {
                out.verdict = Verdict::Pass;
                out.witness = {q, p};
                return out;
            }
            if (t == Tri::Unknown) {
                if (!planar && !out.witness) out.witness = {q, p};
                any_unknown = true;
            }
        }
    }
    if (!planar && out.witness) {
        out.verdict = Verdict::Pass;
        out.provenance = Provenance::Numeric;
        return out;
    }
    // Exact data without a match, or opaque angles whose combination is asserted irrational, cannot match.
    out.verdict = any_unknown || !(is_exact(a) && is_exact(b)) ? Verdict::Undecided : Verdict::Fail;
    if (planar && out.verdict == Verdict::Undecided && !any_unknown) {
        const auto& pa = std::get<PlanarOrthogonal>(a);
        const auto& pb = std::get<PlanarOrthogonal>(b);
        // q·α − p·β = 0 needs every opaque token to cancel; a surviving irrational token rules it out.
        bool impossible = !pa.reflect && !pb.reflect;
        if (impossible) {
            for (const auto& [tok, term] : pa.rotation.terms()) {
                const auto& other = pb.rotation.terms();
                impossible = impossible && term.irrational && other.find(tok) == other.end();
            }
            for (const auto& [tok, term] : pb.rotation.terms()) {
                const auto& other = pa.rotation.terms();
                impossible = impossible && term.irrational && other.find(tok) == other.end();
            }
            impossible = impossible && !(pa.rotation.terms().empty() && pb.rotation.terms().empty());
        }
        if (impossible) out.verdict = Verdict::Fail;
    }
    out.provenance = out.verdict == Verdict::Fail ? Provenance::Exact : Provenance::Numeric;
    return out;
}

/// The two conditions on the end maps, the constant M = q·p·s·t, and which of the planar special cases applies.
struct Thm14Result {
    ExponentSearch cond_a, cond_b;
    std::optional<std::int64_t> m;
    // Planar cases that hold, given condition A: 1 both rotations rational, 2 both reflecting, 3 rotation then
    // reflection with a rational rotation, 4 equal linear parts.
    std::vector<int> planar_cases;

    Verdict verdict() const {
        if (cond_a.verdict == Verdict::Pass && cond_b.verdict == Verdict::Pass) return Verdict::Pass;
        if (cond_a.verdict == Verdict::Fail || cond_b.verdict == Verdict::Fail) return Verdict::Fail;
        return Verdict::Undecided;
    }

    AnalysisReport report() const {
        AnalysisReport r{"theorem14", verdict(), {}, {}};
        auto put = [&](const std::string& name, const ExponentSearch& e, const char* k1, const char* k2) {
            AnalysisReport c{name, e.verdict, {}, {}};
            if (e.witness) {
                c.set(k1, e.witness->first);
                c.set(k2, e.witness->second);
            }
            c.set("provenance", std::string(to_string(e.provenance)));
            r.add(std::move(c));
        };
        if (m) r.set("M", *m, cond_a.provenance == Provenance::Exact && cond_b.provenance == Provenance::Exact ? Provenance::Exact : Provenance::Numeric);
        std::string cases;
        for (int c : planar_cases) cases += (cases.empty() ? "" : ",") + std::to_string(c);
        r.set("planar_cases", cases.empty() ? std::string("none") : cases);
        put("condA", cond_a, "t", "s");
        put("condB", cond_b, "q", "p");
        return r;
    }
};

inline Thm14Result check_theorem14(const IfsPath& path, int search_bound = 64) {
    if (search_bound < 1) throw InvalidInput("search bound must be positive");
    const Similarity& s1 = path.maps().front();
    const Similarity& sn = path.maps().back();
    Thm14Result out;
    out.cond_a = commensurable_ratios(s1.ratio(), sn.ratio(), search_bound);
    out.cond_b = commensurable_orthogonal(s1.orthogonal(), sn.orthogonal(), search_bound);
    if (out.cond_a.witness && out.cond_b.witness && out.cond_a.verdict == Verdict::Pass && out.cond_b.verdict == Verdict::Pass)
        out.m = out.cond_b.witness->first * out.cond_b.witness->second * out.cond_a.witness->first * out.cond_a.witness->second;
    if (path.dim() == 2 && out.cond_a.verdict == Verdict::Pass) {
        const auto& a = std::get<PlanarOrthogonal>(s1.orthogonal());
        const auto& b = std::get<PlanarOrthogonal>(sn.orthogonal());
        if (!a.reflect && !b.reflect && a.rotation.is_exact() && b.rotation.is_exact()) out.planar_cases.push_back(1);
        if (a.reflect && b.reflect) out.planar_cases.push_back(2);
        if (!a.reflect && b.reflect && a.rotation.is_exact()) out.planar_cases.push_back(3);
        if (a.reflect == b.reflect && a.rotation == b.rotation) out.planar_cases.push_back(4);
    }
    return out;
}

}  // namespace ifsarc
