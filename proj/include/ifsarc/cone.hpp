#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ifs_path.hpp"
#include "report.hpp"

namespace ifsarc {

namespace detail {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a) {
    a = std::fmod(a, two_pi);
    return a < 0 ? a + two_pi : a;
}

/// Union of closed arcs on the circle, stored as merged intervals of [0, 2π).
class ArcUnion {
public:
    void add(double start, double length) {
        if (length >= two_pi) {
            raw_.push_back({0, two_pi});
            return;
        }
        start = wrap_angle(start);
        if (start + length <= two_pi) {
            raw_.push_back({start, start + length});
        } else {
            raw_.push_back({start, two_pi});
            raw_.push_back({0, start + length - two_pi});
        }
    }

    /// Smallest single arc containing the union: the complement of the widest gap.
    struct Cover {
        double start = 0, length = 0;
    };
    Cover cover() const {
        if (raw_.empty()) return {0, 0};
        auto iv = raw_;
        std::sort(iv.begin(), iv.end());
        std::vector<std::pair<double, double>> merged{iv.front()};
        for (std::size_t k = 1; k < iv.size(); ++k) {
            if (iv[k].first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv[k].second);
            else
                merged.push_back(iv[k]);
        }
        double best_gap = -1, gap_end = 0;
        for (std::size_t k = 0; k < merged.size(); ++k) {
            const double from = merged[k].second;
            const double to = k + 1 < merged.size() ? merged[k + 1].first : merged.front().first + two_pi;
            if (to - from > best_gap) best_gap = to - from, gap_end = to;
        }
        if (best_gap <= 0) return {0, two_pi};
        return {wrap_angle(gap_end), two_pi - best_gap};
    }

private:
    std::vector<std::pair<double, double>> raw_;
};

/// Planar orthogonal map acting on directions: θ ↦ β ± θ.
struct AngleAction {
    double beta = 0;
    bool reflect = false;
    double apply(double theta) const { return reflect ? beta - theta : beta + theta; }
};

inline AngleAction angle_action(const OrthogonalPart& a) {
    const auto& p = std::get<PlanarOrthogonal>(a);
    return {p.rotation.radians(), p.reflect};
}

/// Order of a planar orthogonal map when it is provably finite.
inline std::optional<std::int64_t> finite_order(const OrthogonalPart& a) {
    const auto& p = std::get<PlanarOrthogonal>(a);
    if (p.reflect) return 2;
    if (!p.rotation.is_exact()) return std::nullopt;
    return boost::multiprecision::denominator(p.rotation.exact_turns()).convert_to<std::int64_t>();
}

inline bool arcs_overlap(const ArcUnion::Cover& a, const ArcUnion::Cover& b) {
    auto inside = [](double x, const ArcUnion::Cover& c) { return wrap_angle(x - c.start) <= c.length; };
    return inside(a.start, b) || inside(b.start, a);
}

/// Directions seen from the apex of one side of a junction. The side is the closure of ⋃ G^k(shell) where G
/// fixes the apex and acts on directions by `action`; the shell is a polyline stretch within `error` of the curve.
struct JunctionSide {
    ArcUnion hull;            // every direction of the side (when the order is finite)
    std::vector<double> seen; // directions of exact curve points
    bool complete = false;    // hull covers the whole side
    double clearance = 0;     // distance from the apex to the shell polyline
};

inline JunctionSide junction_side(const Polyline& p, std::size_t first, std::size_t last, std::span<const double> apex, double error,
                                  const OrthogonalPart& q, int point_orbit) {
    JunctionSide side;
    side.clearance = std::numeric_limits<double>::infinity();
    for (std::size_t s = first; s < last; ++s) side.clearance = std::min(side.clearance, point_segment_distance(apex, p.point(s), p.point(s + 1)));
    const AngleAction act = angle_action(q);
    const auto order = finite_order(q);
    auto dir = [&](std::span<const double> x) { return std::atan2(x[1] - apex[1], x[0] - apex[0]); };
    std::vector<AngleAction> powers;
    AngleAction cur{0, false};
    for (int k = 0; k < (order ? static_cast<int>(*order) : point_orbit); ++k) {
        powers.push_back(cur);
        cur = {act.apply(cur.beta), act.reflect != cur.reflect};
    }
    for (std::size_t v = first; v <= last; ++v) {
        if (dist(p.point(v), apex) <= 1e-12) continue;
        const double th = dir(p.point(v));
        for (const auto& g : powers) side.seen.push_back(wrap_angle(g.apply(th)));
    }
    side.complete = order.has_value() && side.clearance > error;
    if (!side.complete) return side;
    for (std::size_t s = first; s < last; ++s) {
        auto a = p.point(s), b = p.point(s + 1);
        const double d = point_segment_distance(apex, a, b);
        const double ta = dir(a), tb = dir(b);
        double delta = std::remainder(tb - ta, two_pi);
        const double start = delta >= 0 ? ta : tb;
        delta = std::abs(delta);
        const double pad = std::asin(std::min(1.0, error / d));
        for (const auto& g : powers) {
            const double s0 = g.reflect ? g.apply(start + delta) : g.apply(start);
            side.hull.add(s0 - pad, delta + 2 * pad);
        }
    }
    return side;
}

/// True when exact directions of the two sides alternate at least twice around the circle, so no two disjoint
/// arcs can hold them. Directions of different sides closer than `tol` are discarded as ambiguous.
inline bool interleaved(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    std::vector<std::pair<double, int>> all;
    for (double x : a) all.push_back({x, 0});
    for (double x : b) all.push_back({x, 1});
    if (all.empty()) return false;
    std::sort(all.begin(), all.end());
    const std::size_t n = all.size();
    std::vector<char> keep(n, 1);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& x = all[k];
        const auto& y = all[(k + 1) % n];
        double gap = y.first - x.first;
        if (k + 1 == n) gap += two_pi;
        if (x.second != y.second && gap <= tol) keep[k] = keep[(k + 1) % n] = 0;
    }
    std::vector<int> colours;
    for (std::size_t k = 0; k < n; ++k)
        if (keep[k] && (colours.empty() || colours.back() != all[k].second)) colours.push_back(all[k].second);
    if (colours.size() > 1 && colours.front() == colours.back()) colours.pop_back();
    return colours.size() >= 4;
}

}  // namespace detail

/// Closed cones at each junction apex S_i(e1) holding S_i(γ) and S_{i+1}(γ) and meeting only at the apex.
/// PASS emits the cones; certified FAIL means exact curve points interleave around the apex; otherwise the
/// verdict is FAIL with certified = false.
inline AnalysisReport check_cone_containment(const IfsPath& path, int generation = 6, std::size_t budget = default_point_budget,
                                             int point_orbit = 64) {
    if (path.dim() != 2) throw InvalidInput("cone containment is only defined in the plane");
    if (!is_normalized(path)) throw InvalidInput("cone containment needs a normalized path");
    if (generation < 2) throw InvalidInput("cone containment needs generation at least 2");
    const std::size_t n = path.size();
    const ApproxCurve curve = iterate(path, generation, budget);
    const double outer = curve_error_bound(path.max_ratio(), generation - 1, first_step_distance(path).upper);
    const std::size_t per_copy = curve.polyline.segments() / n;
    const std::size_t per_sub = per_copy / n;
    AnalysisReport r{"cone_containment", Verdict::Pass, {}, {}};
    r.set("generation", generation);
    bool all_pass = true, any_certified_fail = false;
    for (std::size_t i = 1; i < n; ++i) {
        const Similarity& si = path.maps()[i - 1];
        const Similarity& sj = path.maps()[i];
        const OrthogonalPart qa = compose(compose(si.orthogonal(), path.maps().back().orthogonal()), inverse(si.orthogonal()));
        const OrthogonalPart qb = compose(compose(sj.orthogonal(), path.maps().front().orthogonal()), inverse(sj.orthogonal()));
        const auto apex = curve.polyline.point(i * per_copy);
        const double ea = si.ratio().to_double() * outer, eb = sj.ratio().to_double() * outer;
        const auto a = detail::junction_side(curve.polyline, (i - 1) * per_copy, i * per_copy - per_sub, apex, ea, qa, point_orbit);
        const auto b = detail::junction_side(curve.polyline, i * per_copy + per_sub, (i + 1) * per_copy, apex, eb, qb, point_orbit);
        AnalysisReport j{"junction " + std::to_string(i), Verdict::Pass, {}, {}};
        j.set("apex_x", apex[0]);
        j.set("apex_y", apex[1]);
        const bool resolvable = std::min(a.clearance - ea, b.clearance - eb) > 0;
        if (!resolvable && detail::finite_order(qa) && detail::finite_order(qb))
            throw DegenerateError("apex radius degenerate at junction " + std::to_string(i) + ": copy clearance below the error bound at generation " +
                                  std::to_string(generation));
        bool pass = false;
        if (a.complete && b.complete) {
            const auto ca = a.hull.cover(), cb = b.hull.cover();
            pass = ca.length < detail::two_pi && cb.length < detail::two_pi && !detail::arcs_overlap(ca, cb);
            if (pass) {
                // Widen both arcs by a quarter of the smaller gap between them.
                const double g1 = detail::wrap_angle(cb.start - (ca.start + ca.length));
                const double g2 = detail::wrap_angle(ca.start - (cb.start + cb.length));
                const double pad = 0.25 * std::min(g1, g2);
                j.set("left_direction", detail::wrap_angle(ca.start + 0.5 * ca.length));
                j.set("left_half_angle", 0.5 * ca.length + pad);
                j.set("right_direction", detail::wrap_angle(cb.start + 0.5 * cb.length));
                j.set("right_half_angle", 0.5 * cb.length + pad);
            }
        }
        if (!pass) {
            const bool certified = detail::interleaved(a.seen, b.seen, 1e-9);
            j.verdict = Verdict::Fail;
            j.set("certified", certified);
            if (!certified) j.set("note", "not certified at generation " + std::to_string(generation));
            all_pass = false;
            any_certified_fail = any_certified_fail || certified;
        }
        r.add(std::move(j));
    }
    if (!all_pass) {
        r.verdict = Verdict::Fail;
        r.set("certified", any_certified_fail);
        if (!any_certified_fail) r.set("note", "not certified at generation " + std::to_string(generation));
    }
    return r;
}

}  // namespace ifsarc
