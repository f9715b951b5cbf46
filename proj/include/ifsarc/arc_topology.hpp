#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ifs_path.hpp"
#include "level_curve.hpp"
#include "report.hpp"
#include "segments.hpp"

namespace ifsarc {

/// Two points of the invariant set, S_σ(fix S_w) and S_σ'(fix S_w'), lying in generation-1 copies that may
/// not meet there. Vertices are the case w = 1 (the point S_σ(0)) or w = N (the point S_σ(e1)).
struct Coincidence {
    int generation = 0;
    std::size_t copy_i = 0, copy_j = 0;  // 1-based copy letters, copy_i < copy_j
    Word address_i, period_i, address_j, period_j;
    std::vector<double> point;
    double distance = 0;
};

inline std::string periodic_address(const Word& w, const Word& period) {
    std::string s = w.to_string();
    return s + period.to_string() + "^inf";
}

/// Separation record for one pair of generation-1 copies.
struct PairSeparation {
    std::size_t i = 0, j = 0;  // 1-based copy letters
    bool adjacent = false;
    bool separated = false;
    int generation = 0;        // generation at which the best margin was found
    double distance = 0;       // polyline distance (after removing the junction ball for adjacent pairs)
    double margin = -std::numeric_limits<double>::infinity();  // distance − summed error bounds
    double junction_radius = 0;  // adjacent pairs: the copies are only shown disjoint outside this ball
};

struct ArcCertificate {
    Verdict verdict = Verdict::Undecided;
    int generation = 0;
    std::vector<PairSeparation> pairs;
    std::optional<Coincidence> coincidence;

    AnalysisReport report() const {
        AnalysisReport r{"certify_arc", verdict, {}, {}};
        r.set("generation", generation);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& p : pairs) worst = std::min(worst, p.margin);
        if (std::isfinite(worst)) r.set("min_margin", worst, Provenance::CertifiedLowerBound);
        for (const auto& p : pairs) {
            if (p.generation == 0) continue;
            AnalysisReport c{"copies(" + std::to_string(p.i) + "," + std::to_string(p.j) + ")", p.separated ? Verdict::Pass : Verdict::Undecided, {}, {}};
            c.set("adjacent", p.adjacent);
            c.set("generation", p.generation);
            c.set("distance", p.distance, Provenance::Numeric);
            c.set("margin", p.margin, Provenance::CertifiedLowerBound);
            if (p.adjacent) c.set("junction_radius", p.junction_radius, Provenance::Numeric);
            r.add(std::move(c));
        }
        if (coincidence) {
            AnalysisReport c{"coincidence", Verdict::NonArcWitness, {}, {}};
            c.set("generation", coincidence->generation);
            c.set("copies", "(" + std::to_string(coincidence->copy_i) + "," + std::to_string(coincidence->copy_j) + ")");
            c.set("address_i", periodic_address(coincidence->address_i, coincidence->period_i));
            c.set("address_j", periodic_address(coincidence->address_j, coincidence->period_j));
            for (std::size_t k = 0; k < coincidence->point.size(); ++k) c.set("x" + std::to_string(k + 1), coincidence->point[k], Provenance::Numeric);
            c.set("distance", coincidence->distance, Provenance::Numeric);
            r.add(std::move(c));
        }
        return r;
    }
};

struct ArcOptions {
    int max_generation = 30;  // levels are capped by the budget as well
    std::size_t budget = default_point_budget;
    double junction_factor = 8;      // smallest junction ball radius, in units of the error bound
    double coincidence_tol = 1e-12;  // relative to |b − a|
    double max_junction_fraction = 0.1;  // junction ball radius allowed, relative to the copy size
    int periodic_depth = 4;              // prefix length for the S_σ(fix S_w) coincidence search (0 disables it)
    int period_length = 2;
};

namespace detail {

struct Candidate {
    std::vector<double> x;
    std::size_t copy_a, copy_b;  // 0-based copies holding the point (equal unless it is a junction)
    Word address, period;
};

/// First pair of candidates within `tol` of each other whose copies may not share that point.
inline std::optional<Coincidence> find_coincidence(const std::vector<Candidate>& pts, const std::vector<std::vector<double>>& junctions,
                                                   double tol, int generation) {
    if (pts.empty()) return std::nullopt;
    const std::size_t n = pts.front().x.size();
    struct Hash {
        std::size_t operator()(const std::vector<std::int64_t>& c) const noexcept {
            std::size_t h = 1469598103934665603ULL;
            for (auto v : c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
            return h;
        }
    };
    const double cell = std::max(tol, 1e-300) * 4;
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, Hash> grid;
    grid.reserve(pts.size());
    auto key_of = [&](const std::vector<double>& x) {
        std::vector<std::int64_t> k(n);
        for (std::size_t d = 0; d < n; ++d) k[d] = static_cast<std::int64_t>(std::floor(x[d] / cell));
        return k;
    };
    for (std::size_t j = 0; j < pts.size(); ++j) grid[key_of(pts[j].x)].push_back(j);
    std::vector<std::vector<std::int64_t>> offsets{{}};
    for (std::size_t d = 0; d < n; ++d) {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& o : offsets)
            for (std::int64_t v = -1; v <= 1; ++v) {
                auto e = o;
                e.push_back(v);
                next.push_back(std::move(e));
            }
        offsets = std::move(next);
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const auto base = key_of(pts[j].x);
        for (const auto& off : offsets) {
            auto key = base;
            for (std::size_t d = 0; d < n; ++d) key[d] += off[d];
            auto it = grid.find(key);
            if (it == grid.end()) continue;
            for (std::size_t k : it->second) {
                if (k <= j) continue;
                const double d = dist(pts[j].x, pts[k].x);
                if (d > tol) continue;
                // Forbidden: copies two or more apart, or adjacent copies meeting away from their junction.
                for (std::size_t a : {pts[j].copy_a, pts[j].copy_b})
                    for (std::size_t b : {pts[k].copy_a, pts[k].copy_b}) {
                        const std::size_t lo = std::min(a, b), hi = std::max(a, b);
                        if (lo == hi) continue;
                        if (hi - lo == 1 && dist(pts[j].x, junctions[lo]) <= tol) continue;
                        const Candidate& ci = a == lo ? pts[j] : pts[k];
                        const Candidate& cj = a == lo ? pts[k] : pts[j];
                        return Coincidence{generation, lo + 1, hi + 1, ci.address, ci.period, cj.address, cj.period, ci.x, d};
                    }
            }
        }
    }
    return std::nullopt;
}

inline std::vector<Candidate> vertex_candidates(const LevelCurve& c, std::size_t n_maps) {
    const Polyline& p = c.polyline;
    std::vector<Candidate> out;
    out.reserve(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        auto x = p.point(j);
        if (j == c.pieces()) {
            const auto last = n_maps - 1;
            out.push_back({{x.begin(), x.end()}, last, last, Word{{static_cast<int>(n_maps)}}, Word{{static_cast<int>(n_maps)}}});
            continue;
        }
        const auto b = static_cast<std::size_t>(c.copy_of_piece(j));
        const auto a = j > 0 && c.copy_start[b] == j ? b - 1 : b;
        out.push_back({{x.begin(), x.end()}, a, b, c.word(j), Word{{1}}});
    }
    return out;
}

/// Points S_σ(fix S_w) with 1 ≤ |σ| ≤ depth and 1 ≤ |w| ≤ period_length. These are points of the invariant
/// set that need not be vertices at any generation (the gasket's corners are of this kind).
inline std::vector<Candidate> periodic_candidates(const IfsPath& path, int depth, int period_length, std::size_t budget) {
    const std::size_t n_maps = path.size();
    const auto maps = path.numeric();
    std::vector<std::pair<Word, std::vector<double>>> fixed;
    std::vector<Word> words{Word{}};
    for (int len = 1; len <= period_length; ++len) {
        std::vector<Word> next;
        for (const auto& w : words)
            for (std::size_t i = 1; i <= n_maps; ++i) next.push_back(w.then(static_cast<int>(i)));
        words = std::move(next);
        for (const auto& w : words) {
            const AffineMap m = word_affine(path, maps, w);
            // Solve x = M x + b by iteration; the map contracts by ratio^|w|.
            std::vector<double> x(static_cast<std::size_t>(path.dim()), 0.0);
            const int steps = static_cast<int>(std::ceil(40.0 / -std::log10(std::max(m.ratio, 1e-300)))) + 2;
            for (int it = 0; it < steps; ++it) x = m(x);
            fixed.emplace_back(w, std::move(x));
        }
    }
    std::vector<Candidate> out;
    std::vector<std::pair<Word, AffineMap>> prefixes{{Word{}, AffineMap::identity(path.dim())}};
    for (int d = 1; d <= depth; ++d) {
        std::vector<std::pair<Word, AffineMap>> next;
        for (const auto& [w, m] : prefixes)
            for (std::size_t i = 1; i <= n_maps; ++i) next.emplace_back(w.then(static_cast<int>(i)), m.then_inner(maps[i - 1]));
        prefixes = std::move(next);
        if (out.size() + prefixes.size() * fixed.size() > budget) throw BudgetError("periodic point search exceeds the point budget");
        for (const auto& [w, m] : prefixes)
            for (const auto& [per, x] : fixed) {
                const std::size_t c = static_cast<std::size_t>(w.letters.front() - 1);
                out.push_back({m(x), c, c, w, per});
            }
    }
    return out;
}

}  // namespace detail

/// Certifies S_i(γ) ∩ S_j(γ) = ∅ for |i − j| ≥ 2 by polyline distances exceeding the summed error bounds
/// of the two copies, and S_i(γ) ∩ S_{i+1}(γ) ⊂ B(junction, ρ) the same way after cutting a ball out of
/// both approximations. Certified copy pairs accumulate over levels (see LevelCurve). Curve vertices are points of
/// the invariant set, as are the points S_σ(fix S_w), so a coincidence between such points of forbidden copy
/// pairs is a non-arc witness (generation 0 in the result means it came from the periodic-point search).
inline ArcCertificate certify_arc(const IfsPath& path, const ArcOptions& opt = {}) {
    const std::size_t n_maps = path.size();
    const auto ratios = path.ratios();
    const Endpoints ends = endpoints(path);
    const double scale = distance(ends.a, ends.b);
    ArcCertificate cert;
    for (std::size_t i = 0; i < n_maps; ++i)
        for (std::size_t j = i + 1; j < n_maps; ++j) cert.pairs.push_back({i + 1, j + 1, j == i + 1});
    const auto maps = path.numeric();
    std::vector<std::vector<double>> junctions;
    for (std::size_t i = 1; i < n_maps; ++i) junctions.push_back(maps[i](std::vector<double>(static_cast<std::size_t>(path.dim()), 0.0)));
    const double tol = opt.coincidence_tol * scale;
    if (opt.periodic_depth > 0) {
        // Keep the search to about 10^5 points.
        double per_prefix = 0;
        for (int l = 1; l <= opt.period_length; ++l) per_prefix += std::pow(static_cast<double>(n_maps), l);
        int depth = 1;
        while (depth < opt.periodic_depth && per_prefix * std::pow(static_cast<double>(n_maps), depth + 1) <= 1e5) ++depth;
        if (auto c = detail::find_coincidence(detail::periodic_candidates(path, depth, opt.period_length, opt.budget), junctions, tol, 0)) {
            cert.coincidence = std::move(c);
            cert.verdict = Verdict::NonArcWitness;
            return cert;
        }
    }
    for (int g = 1; g <= opt.max_generation; ++g) {
        LevelCurve c;
        try {
            c = level_curve(path, g, opt.budget);
        } catch (const BudgetError&) {
            if (g == 1) throw;
            break;
        }
        const Polyline& p = c.polyline;
        cert.generation = g;
        if (auto hit = detail::find_coincidence(detail::vertex_candidates(c, n_maps), junctions, tol, g)) {
            cert.coincidence = std::move(hit);
            cert.verdict = Verdict::NonArcWitness;
            return cert;
        }
        const double e = c.error_bound;
        const double slack = 1e-12 * scale;
        bool all = true;
        for (auto& pr : cert.pairs) {
            if (pr.separated) continue;
            const std::size_t i = pr.i - 1, j = pr.j - 1;
            const std::size_t i0 = c.copy_start[i], i1 = c.copy_start[i + 1], j0 = c.copy_start[j], j1 = c.copy_start[j + 1];
            double d = 0, rho = 0, margin = -std::numeric_limits<double>::infinity();
            if (pr.adjacent) {
                // Try junction balls from junction_factor·e up to the largest allowed radius; any one that
                // separates the rest of the copies will do.
                const double limit = opt.max_junction_fraction * std::min(ratios[i], ratios[j]) * scale;
                const auto z = p.point(j0);
                for (double r = opt.junction_factor * e + slack;; r *= 2) {
                    const double radius = std::min(r, std::max(limit, opt.junction_factor * e + slack));
                    const double dd = min_distance(SegmentSet::outside_ball(p, i0, i1, z, radius - e), SegmentSet::outside_ball(p, j0, j1, z, radius - e)).distance;
                    // A junction ball comparable to the copies themselves certifies nothing useful.
                    const double m = radius > limit ? std::min(0.0, dd - 2 * e - slack) : dd - 2 * e - slack;
                    if (m > margin) margin = m, d = dd, rho = radius;
                    if (m > 0 || radius >= limit) break;
                }
            } else {
                d = min_distance(SegmentSet::from_polyline(p, i0, i1), SegmentSet::from_polyline(p, j0, j1)).distance;
                margin = d - 2 * e - slack;
            }
            if (margin > pr.margin || pr.generation == 0) {
                pr.margin = margin;
                pr.distance = d;
                pr.generation = g;
                pr.junction_radius = rho;
            }
            pr.separated = margin > 0;
            all = all && pr.separated;
        }
        if (all) {
            cert.verdict = Verdict::CertifiedArc;
            return cert;
        }
    }
    cert.verdict = Verdict::Undecided;
    return cert;
}

}  // namespace ifsarc
