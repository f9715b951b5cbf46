#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "arc_topology.hpp"
#include "segments.hpp"

namespace ifsarc {

struct QuasiarcOptions {
    std::size_t budget = default_point_budget;
    bool assume_arc = false;  // skip the arc screening
    int samples = 2000;       // pairs for the converse check
    std::uint64_t seed = 1;
    int ds_max_level = 40;    // bounded turning refines D_S up to this level until it settles
};

namespace detail {

inline void require_arc(const IfsPath& path, const QuasiarcOptions& opt) {
    if (opt.assume_arc) return;
    ArcOptions ao;
    ao.budget = opt.budget;
    const ArcCertificate cert = certify_arc(path, ao);
    if (cert.verdict != Verdict::CertifiedArc)
        throw InvalidInput(std::string("the system did not pass arc screening (") + std::string(to_string(cert.verdict)) + ")");
}

inline double ipow(std::size_t n, int k) { return std::pow(static_cast<double>(n), k); }

/// Diameter of points first..last of a polyline: convex hull in the plane, brute force otherwise.
inline double point_set_diameter(const Polyline& p, std::size_t first, std::size_t last) {
    if (p.dim != 2 || last - first < 64) {
        double d = 0;
        for (std::size_t i = first; i <= last; ++i)
            for (std::size_t j = i + 1; j <= last; ++j) d = std::max(d, dist(p.point(i), p.point(j)));
        return d;
    }
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = first; i <= last; ++i) pts.push_back({p.point(i)[0], p.point(i)[1]});
    std::sort(pts.begin(), pts.end());
    auto cross = [](auto o, auto a, auto b) { return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first); };
    std::vector<std::pair<double, double>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k);
    double d = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            d = std::max(d, std::hypot(hull[i].first - hull[j].first, hull[i].second - hull[j].second));
    return d;
}

inline SegmentSet point_set(const Polyline& p, std::size_t first, std::size_t last) {
    SegmentSet s(p.dim);
    for (std::size_t i = first; i <= last; ++i) s.add(p.point(i), p.point(i), i);
    return s;
}

}  // namespace detail

struct DsResult {
    double lower = 0;     // rigorous lower bound, best over levels 1..g
    double estimate = 0;  // polyline value at level g
    int generation = 0;
    double error_bound = 0;
};

namespace detail {

/// D_S over levels 1..max_level. With `settle` set the scan stops at the first level ≥ min_level whose lower
/// bound is at least half the estimate, or when the budget runs out.
inline DsResult ds_scan(const IfsPath& path, int min_level, int max_level, std::size_t budget, bool settle) {
    const std::size_t n = path.size();
    DsResult out;
    out.lower = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_level; ++k) {
        LevelCurve c;
        try {
            c = level_curve(path, k, budget);
        } catch (const BudgetError&) {
            if (!settle || k == 1) throw;
            break;
        }
        const Polyline& p = c.polyline;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t split = c.copy_start[a], resume = c.copy_start[a + 1];
            const SegmentSet before = a == 0 ? point_set(p, 0, 0) : SegmentSet::from_polyline(p, 0, split);
            const SegmentSet after = a + 1 == n ? point_set(p, resume, resume) : SegmentSet::from_polyline(p, resume, p.segments());
            best = std::min(best, min_distance(before, after).distance);
        }
        out.lower = std::max(out.lower, best - 2 * c.error_bound);
        out.estimate = best;
        out.error_bound = c.error_bound;
        out.generation = k;
        if (settle && k >= min_level && out.lower >= 0.5 * best) break;
    }
    if (!(out.lower > 0))
        throw DegenerateError("D_S lower bound " + format_real(out.lower, 6) + " is not positive at level " + std::to_string(out.generation) +
                              "; increase the level");
    return out;
}

}  // namespace detail

/// Smallest distance between γ before a generation-1 vertex and γ after a later one. The minimum is attained
/// by consecutive vertices, so only the N splits γ[0, t_a] / γ[t_{a+1}, 1] are measured, on level curves.
inline DsResult compute_DS(const IfsPath& path, int generation, const QuasiarcOptions& opt = {}) {
    if (generation < 1) throw InvalidInput("D_S needs generation at least 1");
    if (!is_normalized(path)) throw InvalidInput("D_S needs a normalized path");
    detail::require_arc(path, opt);
    return detail::ds_scan(path, generation, generation, opt.budget, false);
}

/// (x, z, y) with z the only generation-m vertex between x and y. Points are vertex indices of T^g(I).
struct CaseTriple {
    std::size_t x = 0, z = 0, y = 0;
    int m = 0;
    Word sigma;       // length m − 1
    int sigma_m = 0;  // x lies in copy σσ_m, y in copy σ(σ_m + 1)
    int k = 0, l = 0; // x ∈ S_{σσ_m N^k}(γ) \ S_{σσ_m N^{k+1}}(γ); y likewise with blocks of 1s
};

namespace detail {

/// Number of trailing blocks: largest k with d ≤ N^(depth − k).
inline int block_depth(std::size_t d, std::size_t n, int depth) {
    int k = depth;
    double size = 1;
    while (k > 0 && static_cast<double>(d) > size) size *= static_cast<double>(n), --k;
    return k;
}

inline CaseTriple make_triple(std::size_t x, std::size_t zi, std::size_t y, int m, int g, std::size_t n) {
    CaseTriple t{x, zi, y, m, {}, 0, 0, 0};
    std::size_t c = zi / static_cast<std::size_t>(ipow(n, g - m));
    std::vector<int> digits(static_cast<std::size_t>(m));
    for (int j = m - 1; j >= 0; --j) digits[static_cast<std::size_t>(j)] = static_cast<int>(c % n), c /= n;
    for (int j = 0; j + 1 < m; ++j) t.sigma.letters.push_back(digits[static_cast<std::size_t>(j)] + 1);
    t.sigma_m = digits.back();
    t.k = block_depth(zi - x, n, g - m);
    t.l = block_depth(y - zi, n, g - m);
    return t;
}

}  // namespace detail

/// Every case-2 triple of generation-g vertices with x ≠ z ≠ y.
inline std::vector<CaseTriple> enumerate_case2_triples(const IfsPath& path, int generation, const QuasiarcOptions& opt = {}) {
    if (generation < 1) throw InvalidInput("triples need generation at least 1");
    const std::size_t n = path.size();
    const std::size_t total = checked_points(n, generation, opt.budget) - 1;
    detail::require_arc(path, opt);
    std::vector<CaseTriple> out;
    for (int m = 1; m <= generation; ++m) {
        const std::size_t step = static_cast<std::size_t>(detail::ipow(n, generation - m));
        if (step < 2) continue;
        const double pairs = (static_cast<double>(total) / static_cast<double>(step)) * static_cast<double>((step - 1) * (step - 1));
        if (static_cast<double>(out.size()) + pairs > static_cast<double>(opt.budget))
            throw BudgetError("case-2 triple enumeration exceeds the budget of " + std::to_string(opt.budget));
        for (std::size_t zi = step; zi < total; zi += step) {
            if (m > 1 && (zi / step) % n == 0) continue;
            for (std::size_t x = zi - step + 1; x < zi; ++x)
                for (std::size_t y = zi + 1; y < zi + step; ++y) out.push_back(detail::make_triple(x, zi, y, m, generation, n));
        }
    }
    return out;
}

struct BtReport {
    DsResult ds;
    double diam = 0;      // upper bound for diam(γ)
    double c_triple = 0;  // at least 1; max over triples of max{d(x,z), d(z,y)} / d(x,y)
    double c_bt = 0;      // 2·C_triple·diam / D_S lower bound
    int generation = 0;
    std::size_t converse_pairs = 0, converse_violations = 0;
    double converse_ratio = 0;  // largest diam(γ_{x,y}) / d(x,y) seen on sampled pairs
    Verdict verdict = Verdict::Undecided;

    AnalysisReport report() const {
        AnalysisReport r{"bounded_turning", verdict, {}, {}};
        r.set("generation", generation);
        r.set("D_S_lower", ds.lower, Provenance::CertifiedLowerBound);
        r.set("D_S_estimate", ds.estimate, Provenance::Numeric);
        r.set("D_S_level", ds.generation);
        r.set("diam", diam, Provenance::CertifiedUpperBound);
        r.set("C_triple", c_triple, Provenance::Numeric);
        r.set("C_bt", c_bt, Provenance::Numeric);
        r.set("converse_pairs", converse_pairs);
        r.set("converse_violations", converse_violations);
        r.set("converse_ratio", converse_ratio, Provenance::Numeric);
        return r;
    }
};

/// Triples of a deeper generation-m vertex are similar images of generation-1 triples of a coarser curve, so the
/// maximum over all triples is the maximum over m = 1. For x left of z the worst partner is the nearest y,
/// and symmetrically for y.
inline double triple_constant(const Polyline& p, std::size_t n_maps) {
    const std::size_t per = p.segments() / n_maps;
    double c = 1;  // the constant is taken to be at least 1
    if (per < 2) return c;
    for (std::size_t i = 1; i < n_maps; ++i) {
        const std::size_t zi = i * per;
        const auto z = p.point(zi);
        const SegmentSet left = detail::point_set(p, zi - per + 1, zi - 1);
        const SegmentSet right = detail::point_set(p, zi + 1, zi + per - 1);
        for (std::size_t x = zi - per + 1; x < zi; ++x) c = std::max(c, dist(p.point(x), z) / distance_to(right, p.point(x)));
        for (std::size_t y = zi + 1; y < zi + per; ++y) c = std::max(c, dist(p.point(y), z) / distance_to(left, p.point(y)));
    }
    return c;
}

inline BtReport bt_constant(const IfsPath& path, int generation, const QuasiarcOptions& opt = {}) {
    BtReport out;
    out.generation = generation;
    if (generation < 1) throw InvalidInput("bounded turning needs generation at least 1");
    if (!is_normalized(path)) throw InvalidInput("bounded turning needs a normalized path");
    detail::require_arc(path, opt);
    out.ds = detail::ds_scan(path, generation, std::max(generation, opt.ds_max_level), opt.budget, true);
    const ApproxCurve curve = iterate(path, generation, opt.budget);
    const Polyline& p = curve.polyline;
    out.diam = detail::point_set_diameter(p, 0, p.size() - 1) + 2 * curve.error_bound;
    out.c_triple = triple_constant(p, path.size());
    out.c_bt = 2 * out.c_triple * out.diam / out.ds.lower;

    std::mt19937_64 rng(opt.seed);
    const std::size_t last = p.size() - 1;
    const double max_span = static_cast<double>(std::min<std::size_t>(last, 4096));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < opt.samples && last > 0; ++s) {
        const std::size_t span = std::max<std::size_t>(1, static_cast<std::size_t>(std::exp(unit(rng) * std::log(max_span))));
        const std::size_t u = static_cast<std::size_t>(unit(rng) * static_cast<double>(last - std::min(span, last) + 1));
        const std::size_t v = std::min(last, u + span);
        const double d = dist(p.point(u), p.point(v));
        if (d <= 0) continue;
        const double ratio = detail::point_set_diameter(p, u, v) / d;
        ++out.converse_pairs;
        out.converse_ratio = std::max(out.converse_ratio, ratio);
        if (ratio > out.c_bt) ++out.converse_violations;
    }
    out.verdict = std::isfinite(out.c_bt) && out.converse_violations == 0 ? Verdict::Pass : Verdict::Fail;
    return out;
}

}  // namespace ifsarc
