#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ifs_path.hpp"
#include "level_curve.hpp"
#include "report.hpp"
#include "segments.hpp"
#include "theorem14.hpp"

namespace ifsarc {

namespace detail {

/// Irrationality of an angle combination as a multiple of 2π: exact turns are rational (FAIL), a single
/// surviving token marked irrational makes it irrational (PASS), anything else is UNDECIDED.
inline Verdict irrational_turns(const Rotation2& c) {
    if (c.is_exact()) return Verdict::Fail;
    if (c.terms().size() == 1 && c.terms().begin()->second.irrational) return Verdict::Pass;
    return Verdict::Undecided;
}

inline const PlanarOrthogonal& planar_part(const Similarity& s) { return std::get<PlanarOrthogonal>(s.orthogonal()); }

inline void rotate_about(std::span<const double> x, std::span<const double> c, double cs, double sn, std::span<double> out) {
    const double dx = x[0] - c[0], dy = x[1] - c[1];
    out[0] = c[0] + cs * dx - sn * dy;
    out[1] = c[1] + sn * dx + cs * dy;
}

/// Exact points of one copy (vertices of the level curve, apex excluded) and the segments of the other.
struct JunctionPair {
    std::vector<double> apex;
    std::vector<std::vector<double>> points[2];
    SegmentSet segments[2];
    double error = 0;
    double max_radius[2] = {0, 0};
};

inline JunctionPair junction_pair(const LevelCurve& c, std::size_t i) {
    JunctionPair jp;
    const Polyline& p = c.polyline;
    const auto apex = p.point(c.copy_start[i]);
    jp.apex.assign(apex.begin(), apex.end());
    jp.error = c.error_bound;
    for (int side = 0; side < 2; ++side) {
        const std::size_t lo = c.copy_start[i - 1 + static_cast<std::size_t>(side)], hi = c.copy_start[i + static_cast<std::size_t>(side)];
        jp.segments[side] = SegmentSet::from_polyline(p, lo, hi);
        for (std::size_t v = lo; v <= hi; ++v) {
            auto x = p.point(v);
            const double d = distance(x, apex);
            jp.max_radius[side] = std::max(jp.max_radius[side], d);
            if (d > 0) jp.points[side].emplace_back(x.begin(), x.end());
        }
    }
    return jp;
}

/// Radii reachable by the inflated segments, as merged intervals.
inline std::vector<std::pair<double, double>> radial_cover(const SegmentSet& s, std::span<const double> apex, double error) {
    std::vector<std::pair<double, double>> iv;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double lo = point_segment_distance(apex, s.a(k), s.b(k));
        const double hi = std::max(distance(s.a(k), apex), distance(s.b(k), apex));
        iv.push_back({std::max(0.0, lo - error), hi + error});
    }
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& x : iv) {
        if (!merged.empty() && x.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, x.second);
        else
            merged.push_back(x);
    }
    return merged;
}

struct Obstruction {
    Verdict verdict = Verdict::Undecided;
    std::string method;            // "radial" or "sweep"
    double radius = 0;             // radial: a radius hit by the moving copy and missed by the target
    std::size_t intervals = 0;     // sweep: number of certified angle intervals
    std::optional<double> suspect; // sweep: an angle that could not be excluded
};

/// Certifies that no rotation about the apex maps the exact points `from` into the inflated segments `to`.
inline Obstruction obstruct(const std::vector<std::vector<double>>& from, const SegmentSet& to, std::span<const double> apex, double error,
                            double min_width) {
    Obstruction ob;
    const auto cover = radial_cover(to, apex, error);
    for (const auto& x : from) {
        const double r = distance(x, apex);
        const bool hit = std::any_of(cover.begin(), cover.end(), [&](const auto& iv) { return r >= iv.first && r <= iv.second; });
        if (!hit) {
            ob.verdict = Verdict::Pass;
            ob.method = "radial";
            ob.radius = r;
            return ob;
        }
    }
    // Sweep: on [θ − h, θ + h] a point at radius ρ moves at most ρh from its image at θ.
    std::vector<std::size_t> order;
    const std::size_t stride = std::max<std::size_t>(1, from.size() / 512);
    for (std::size_t k = 0; k < from.size(); k += stride) order.push_back(k);
    std::size_t last = 0;
    std::vector<double> y(2);
    auto certify = [&](double theta, double h) {
        const double cs = std::cos(theta), sn = std::sin(theta);
        for (std::size_t t = 0; t < order.size(); ++t) {
            const std::size_t k = order[(last + t) % order.size()];
            rotate_about(from[k], apex, cs, sn, y);
            if (distance_to(to, y) > error + distance(from[k], apex) * h) {
                last = (last + t) % order.size();
                return true;
            }
        }
        return false;
    };
    constexpr double two_pi = 2 * std::numbers::pi;
    std::vector<std::pair<double, double>> stack;  // (centre, half width)
    const int start = 256;
    for (int k = start; k-- > 0;) stack.push_back({(k + 0.5) * two_pi / start, 0.5 * two_pi / start});
    while (!stack.empty()) {
        auto [c, h] = stack.back();
        stack.pop_back();
        if (certify(c, h)) {
            ++ob.intervals;
            continue;
        }
        if (h < min_width) {
            ob.suspect = c;
            return ob;
        }
        stack.push_back({c + 0.5 * h, 0.5 * h});
        stack.push_back({c - 0.5 * h, 0.5 * h});
    }
    ob.verdict = Verdict::Pass;
    ob.method = "sweep";
    return ob;
}

}  // namespace detail

/// Whether some rotation about the junction apex S_i(e1) maps S_i(γ) into S_{i+1}(γ) or the reverse, decided on
/// the level curve at `generation`. Each direction is excluded by a radius one copy reaches and the other cannot,
/// or by covering the circle of angles with intervals on which some exact point stays off the inflated target.
inline AnalysisReport rotation_obstruction(const IfsPath& path, std::size_t junction, int generation = 8, std::size_t budget = default_point_budget) {
    if (path.dim() != 2) throw InvalidInput("rotation obstruction is only defined in the plane");
    if (!is_normalized(path)) throw InvalidInput("rotation obstruction needs a normalized path");
    if (junction < 1 || junction >= path.size()) throw InvalidInput("junction index must lie in 1..N-1");
    const LevelCurve c = level_curve(path, generation, budget);
    const auto jp = detail::junction_pair(c, junction);
    if (std::min(jp.max_radius[0], jp.max_radius[1]) <= 2 * jp.error)
        throw DegenerateError("degenerate apex at junction " + std::to_string(junction) + ": a copy lies within the error bound of the apex");
    AnalysisReport r{"rotation_obstruction", Verdict::Pass, {}, {}};
    r.set("junction", static_cast<std::int64_t>(junction));
    r.set("generation", generation);
    r.set("error_bound", jp.error, Provenance::CertifiedUpperBound);
    const std::string names[2] = {"copy " + std::to_string(junction) + " into copy " + std::to_string(junction + 1),
                                  "copy " + std::to_string(junction + 1) + " into copy " + std::to_string(junction)};
    for (int side = 0; side < 2; ++side) {
        const auto ob = detail::obstruct(jp.points[side], jp.segments[1 - side], jp.apex, jp.error, 1e-7);
        AnalysisReport d{names[side], ob.verdict, {}, {}};
        d.set("max_radius", jp.max_radius[side], Provenance::Numeric);
        if (ob.verdict == Verdict::Pass) {
            d.set("method", ob.method);
            if (ob.method == "radial") d.set("radius", ob.radius, Provenance::Exact);
            else d.set("intervals", static_cast<std::int64_t>(ob.intervals));
        } else if (ob.suspect) {
            d.set("suspect_angle", *ob.suspect, Provenance::Numeric);
        }
        if (ob.verdict != Verdict::Pass) r.verdict = Verdict::Undecided;
        r.add(std::move(d));
    }
    return r;
}

/// Sufficient conditions for γ to fail to be an arc although every pair of adjacent copies meets in one point:
/// (1) S_1, S_N preserve orientation; (2) r_1^t = r_N^s with t·α_1 − s·α_N an irrational multiple of 2π;
/// (3a) S_i, S_{i+1} have equal orientation and (3b) no rotation about their junction maps one copy into the
/// other. The variant rule takes S_N orientation reversing, r_1^t = r_N^2 and t·α_1 irrational.
/// PASS means the conditions hold (γ is not an arc); FAIL means they provably do not.
inline AnalysisReport check_thm18_conditions(const IfsPath& path, int search_bound = 64, int generation = 8,
                                             std::size_t budget = default_point_budget) {
    if (path.dim() != 2) throw InvalidInput("the non-arc criteria are only defined in the plane");
    if (!is_normalized(path)) throw InvalidInput("the non-arc criteria need a normalized path");
    const auto& maps = path.maps();
    const auto& a1 = detail::planar_part(maps.front());
    const auto& an = detail::planar_part(maps.back());
    AnalysisReport r{"non_arc_criteria", Verdict::Undecided, {}, {}};

    Verdict rule = Verdict::Fail;
    if (!a1.reflect && !an.reflect) {
        r.set("rule", "main");
        AnalysisReport c2{"condition2", Verdict::Undecided, {}, {}};
        const auto ca = commensurable_ratios(maps.front().ratio(), maps.back().ratio(), search_bound);
        c2.set("ratio_search", std::string(to_string(ca.verdict)));
        if (ca.witness && ca.verdict == Verdict::Pass) {
            const auto [t, s] = *ca.witness;
            const Rotation2 comb = a1.rotation.times(t) - an.rotation.times(s);
            c2.set("t", t);
            c2.set("s", s);
            c2.set("combination", comb.to_string());
            c2.verdict = detail::irrational_turns(comb);
            if (c2.verdict == Verdict::Undecided) c2.set("irrationality_unknown", true);
            if (ca.provenance != Provenance::Exact && c2.verdict == Verdict::Pass) c2.verdict = Verdict::Undecided;
        } else {
            c2.verdict = ca.verdict;
        }
        rule = c2.verdict;
        r.add(std::move(c2));
    } else if (!a1.reflect && an.reflect) {
        r.set("rule", "variant");
        AnalysisReport cv{"variant", Verdict::Undecided, {}, {}};
        const Scalar rn2 = maps.back().ratio().is_exact() ? Scalar(maps.back().ratio().rational() * maps.back().ratio().rational())
                                                          : Scalar::approx(std::pow(maps.back().ratio().to_double(), 2));
        // Smallest t with r_1^t = r_N^2; exact data decides, approximate data only suggests.
        std::optional<std::int64_t> t;
        const bool exact = maps.front().ratio().is_exact() && rn2.is_exact();
        for (std::int64_t k = 1; k <= search_bound && !t; ++k) {
            if (exact) {
                if (rational_pow(maps.front().ratio().rational(), static_cast<unsigned>(k)) == rn2.rational()) t = k;
            } else if (std::abs(static_cast<double>(k) * std::log(maps.front().ratio().to_double()) - std::log(rn2.to_double())) <=
                       1e-12 * std::abs(std::log(rn2.to_double()))) {
                t = k;
            }
        }
        const Verdict found = t ? (exact ? Verdict::Pass : Verdict::Undecided) : (exact ? Verdict::Fail : Verdict::Undecided);
        if (t) {
            cv.set("t", *t);
            const Rotation2 comb = a1.rotation.times(*t);
            cv.set("combination", comb.to_string());
            const Verdict irr = detail::irrational_turns(comb);
            cv.verdict = found == Verdict::Pass ? irr : (irr == Verdict::Fail ? Verdict::Fail : Verdict::Undecided);
        } else {
            cv.verdict = found;
        }
        rule = cv.verdict;
        r.add(std::move(cv));
    } else {
        r.set("rule", "none");
        r.set("condition1", "S_1 reverses orientation");
    }

    std::vector<std::size_t> parity;
    for (std::size_t i = 1; i < path.size(); ++i)
        if (detail::planar_part(maps[i - 1]).reflect == detail::planar_part(maps[i]).reflect) parity.push_back(i);
    std::string list;
    for (auto i : parity) list += (list.empty() ? "" : ",") + std::to_string(i);
    r.set("condition3a_junctions", list.empty() ? std::string("none") : list);

    Verdict third = parity.empty() ? Verdict::Fail : Verdict::Undecided;
    if (rule != Verdict::Fail) {
        for (auto i : parity) {
            AnalysisReport ob = rotation_obstruction(path, i, generation, budget);
            if (ob.verdict == Verdict::Pass) third = Verdict::Pass;
            r.add(std::move(ob));
            if (third == Verdict::Pass) break;
        }
    }
    if (rule == Verdict::Fail || third == Verdict::Fail) {
        r.verdict = Verdict::Fail;
        r.set("note", "criteria not met");
    } else if (rule == Verdict::Pass && third == Verdict::Pass) {
        r.verdict = Verdict::Pass;
        r.set("note", "criteria met: not an arc");
    }
    return r;
}

/// Two points of γ, one in each copy at a junction, that nearly coincide away from the apex. With
/// G = S_i S_N S_i⁻¹ and H = S_{i+1} S_1 S_{i+1}⁻¹ (both fix the apex z), G^{m·s}(S_i γ) = S_{i N^{ms}}(γ) and
/// H^{m·t}(S_{i+1}γ) = S_{(i+1) 1^{mt}}(γ) are the same similarity of R_φ(S_i γ) and S_{i+1}γ, where R_φ rotates
/// about z. A crossing of those two away from z closes a loop in γ through z.
struct LoopWitness {
    std::size_t junction = 0;
    std::int64_t m = 0, t = 0, s = 0;
    double angle = 0;              // φ in radians
    Word word_a, word_b;           // renormalized copies: (i, N^{ms}) and (i+1, 1^{mt})
    Word point_a, point_b;         // the two near-coincident points are S_{point_a}(0) and S_{point_b}(0)
    std::vector<double> local_a;   // R_φ S_{i u}(0), renormalized frame
    std::vector<double> local_b;   // S_{(i+1) v}(0), renormalized frame
    std::vector<double> apex;
    double gap = 0;                // |local_a − local_b|
    double apex_distance = 0;      // distance of the shared point from z in the renormalized frame
    double diam = 0;

    AnalysisReport report() const {
        AnalysisReport r{"loop_witness", Verdict::NonArcWitness, {}, {}};
        r.set("junction", static_cast<std::int64_t>(junction));
        r.set("m", m);
        r.set("t", t);
        r.set("s", s);
        r.set("angle", angle, Provenance::Numeric);
        r.set("word_a", word_a.to_string());
        r.set("word_b", word_b.to_string());
        r.set("x", local_b[0], Provenance::Numeric);
        r.set("y", local_b[1], Provenance::Numeric);
        r.set("gap", gap, Provenance::Numeric);
        r.set("apex_distance", apex_distance, Provenance::Numeric);
        return r;
    }
};

struct LoopOptions {
    int level = 7;                   // coarse crossing search
    double apex_fraction = 0.05;     // crossings closer to z than this fraction of the smaller copy are ignored
    double tolerance = 1e-9;         // relative to diam(γ)
    std::size_t max_pairs = 20000;   // refinement front size
    std::size_t budget = default_point_budget;
};

namespace detail {

struct Piece {
    std::vector<int> word;  // full word, first letter is the copy
    AffineMap map;
};

/// Refines a crossing between R_φ(S_i γ) and S_{i+1}γ down to pieces of relative size `tol`, keeping all piece
/// pairs whose enclosing discs overlap. Returns the closest pair of exact points found.
inline std::optional<std::pair<Piece, Piece>> refine_crossing(const std::vector<AffineMap>& maps, std::vector<std::pair<Piece, Piece>> front,
                                                              const AffineMap& rot, std::span<const double> centre, double radius,
                                                              std::span<const double> apex, double keep_out, double tol, std::size_t max_pairs) {
    auto disc = [&](const AffineMap& m) { return std::pair{m(centre), m.ratio * radius}; };
    const std::vector<double> zero{0.0, 0.0};
    for (int round = 0; round < 200 && !front.empty(); ++round) {
        double size = 0;
        for (const auto& [a, b] : front) size = std::max({size, a.map.ratio * radius, b.map.ratio * radius});
        if (size <= tol) break;
        std::vector<std::tuple<double, Piece, Piece>> next;
        for (const auto& [a, b] : front) {
            // Split whichever side is larger.
            const bool split_a = a.map.ratio >= b.map.ratio;
            const Piece& big = split_a ? a : b;
            for (std::size_t k = 0; k < maps.size(); ++k) {
                Piece child{big.word, big.map.then_inner(maps[k])};
                child.word.push_back(static_cast<int>(k + 1));
                const Piece& pa = split_a ? child : a;
                const Piece& pb = split_a ? b : child;
                auto [ca, ra] = disc(rot.then_inner(pa.map));
                auto [cb, rb] = disc(pb.map);
                const double d = distance(ca, cb);
                if (d > ra + rb) continue;
                if (distance(ca, apex) + ra < keep_out || distance(cb, apex) + rb < keep_out) continue;
                next.emplace_back(d - ra - rb, pa, pb);
            }
        }
        std::sort(next.begin(), next.end(), [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
        if (next.size() > max_pairs) next.resize(max_pairs);
        front.clear();
        for (auto& [_, a, b] : next) front.emplace_back(std::move(a), std::move(b));
    }
    if (front.empty()) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t k = 0; k < front.size(); ++k) {
        const double d = distance(rot.then_inner(front[k].first.map)(zero), front[k].second.map(zero));
        if (d < best) best = d, at = k;
    }
    return front[at];
}

}  // namespace detail

/// Searches m = 1..search_bound for an off-apex crossing of R_{φ_m}(S_i γ) and S_{i+1}γ at each junction and
/// refines it to two exact points within options.tolerance·diam(γ). Needs r_1^t = r_N^s; reflecting end maps
/// are handled by doubling both exponents so that G and H act as rotations.
inline std::optional<LoopWitness> find_loop_witness(const IfsPath& path, int search_bound = 64, const LoopOptions& opt = {}) {
    if (path.dim() != 2) throw InvalidInput("loop witnesses are only defined in the plane");
    if (!is_normalized(path)) throw InvalidInput("loop witness search needs a normalized path");
    const auto& maps = path.maps();
    const auto ca = commensurable_ratios(maps.front().ratio(), maps.back().ratio(), search_bound);
    if (ca.verdict != Verdict::Pass || !ca.witness) return std::nullopt;
    auto [t, s] = *ca.witness;
    if (detail::planar_part(maps.front()).reflect || detail::planar_part(maps.back()).reflect) t *= 2, s *= 2;

    const auto numeric = path.numeric();
    const LevelCurve c = level_curve(path, opt.level, opt.budget);
    const Polyline& p = c.polyline;
    double diam = 0, radius = 0;
    const std::vector<double> centre{0.5, 0.0};
    for (std::size_t v = 0; v < p.size(); ++v) radius = std::max(radius, distance(p.point(v), centre));
    radius += c.error_bound;
    {
        std::vector<std::vector<double>> pts;
        for (std::size_t v = 0; v < p.size(); ++v) pts.emplace_back(p.point(v).begin(), p.point(v).end());
        for (std::size_t a = 0; a < pts.size(); a += std::max<std::size_t>(1, pts.size() / 2000))
            for (std::size_t b = 0; b < pts.size(); ++b) diam = std::max(diam, distance(pts[a], pts[b]));
    }

    for (std::size_t i = 1; i < path.size(); ++i) {
        const OrthogonalPart& ai = maps[i - 1].orthogonal();
        const OrthogonalPart& aj = maps[i].orthogonal();
        const OrthogonalPart g = power(compose(compose(ai, maps.back().orthogonal()), inverse(ai)), s);
        const OrthogonalPart h = power(compose(compose(aj, maps.front().orthogonal()), inverse(aj)), t);
        const double step = std::get<PlanarOrthogonal>(g).rotation.radians() - std::get<PlanarOrthogonal>(h).rotation.radians();
        const auto apex_span = p.point(c.copy_start[i]);
        const std::vector<double> apex(apex_span.begin(), apex_span.end());
        const double keep_out = opt.apex_fraction * std::min(numeric[i - 1].ratio, numeric[i].ratio);
        const SegmentSet b_far = SegmentSet::outside_ball(p, c.copy_start[i], c.copy_start[i + 1], apex, keep_out);
        for (std::int64_t m = 1; m <= search_bound; ++m) {
            const double phi = std::remainder(static_cast<double>(m) * step, 2 * std::numbers::pi);
            if (std::abs(phi) < 1e-12) continue;
            const double cs = std::cos(phi), sn = std::sin(phi);
            AffineMap rot{2, 1.0, {cs, -sn, sn, cs}, {apex[0] - cs * apex[0] + sn * apex[1], apex[1] - sn * apex[0] - cs * apex[1]}};
            Polyline moved(2);
            for (std::size_t v = c.copy_start[i - 1]; v <= c.copy_start[i]; ++v) moved.push(rot(p.point(v)));
            const SegmentSet a_far = SegmentSet::outside_ball(moved, 0, moved.segments(), apex, keep_out);
            const auto hit = min_distance(a_far, b_far);
            if (!(hit.distance <= 2 * c.error_bound)) continue;
            // Seed the refinement with every piece pair near the crossing.
            const std::size_t ka = c.copy_start[i - 1] + a_far.tag(hit.first), kb = b_far.tag(hit.second);
            const auto near = rot(p.point(ka));
            std::vector<std::pair<detail::Piece, detail::Piece>> front;
            const double reach = 4 * radius * std::pow(path.max_ratio(), opt.level);
            std::vector<std::size_t> na, nb;
            for (std::size_t k = c.copy_start[i - 1]; k < c.copy_start[i]; ++k)
                if (distance(rot(p.point(k)), near) <= reach) na.push_back(k);
            for (std::size_t k = c.copy_start[i]; k < c.copy_start[i + 1]; ++k)
                if (distance(p.point(k), near) <= reach) nb.push_back(k);
            (void)kb;
            for (auto x : na)
                for (auto y : nb) {
                    const Word wa = c.word(x), wb = c.word(y);
                    front.push_back({{wa.letters, word_affine(path, numeric, wa)}, {wb.letters, word_affine(path, numeric, wb)}});
                }
            const auto best = detail::refine_crossing(numeric, std::move(front), rot, centre, radius, apex, keep_out, opt.tolerance * diam * 0.25,
                                                      opt.max_pairs);
            if (!best) continue;
            const std::vector<double> zero{0.0, 0.0};
            LoopWitness w;
            w.junction = i;
            w.m = m;
            w.t = t;
            w.s = s;
            w.angle = phi;
            w.apex = apex;
            w.diam = diam;
            w.local_a = rot.then_inner(best->first.map)(zero);
            w.local_b = best->second.map(zero);
            w.gap = distance(w.local_a, w.local_b);
            w.apex_distance = distance(w.local_b, apex);
            if (w.gap > opt.tolerance * diam || w.apex_distance < keep_out) continue;
            w.word_a = Word{{static_cast<int>(i)}}.then(static_cast<int>(path.size()), static_cast<std::size_t>(m * s));
            w.word_b = Word{{static_cast<int>(i + 1)}}.then(1, static_cast<std::size_t>(m * t));
            w.point_a = w.word_a;
            w.point_a.letters.insert(w.point_a.letters.end(), best->first.word.begin() + 1, best->first.word.end());
            w.point_b = w.word_b;
            w.point_b.letters.insert(w.point_b.letters.end(), best->second.word.begin() + 1, best->second.word.end());
            return w;
        }
    }
    return std::nullopt;
}

}  // namespace ifsarc
