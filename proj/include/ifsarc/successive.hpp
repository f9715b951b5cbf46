#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifs_path.hpp"
#include "polyline.hpp"

namespace ifsarc {

/// d_H(T^{k+1}(I), T^k(I)) and how it was obtained.
struct SuccessiveDistance {
    int generation = 0;
    double value = 0;
    bool by_configurations = false;  // neighbour-configuration recursion instead of explicit polylines
    std::size_t configurations = 0;
};

/// Ball (c, R) with S_i(B) ⊂ B for every map and I ⊂ B, so it contains every T^k(I) and the invariant set.
struct InvariantBall {
    std::vector<double> center;
    double radius = 0;
};

inline InvariantBall invariant_ball(const IfsPath& path) {
    // Centre on the bounding box of a coarse approximation, then grow the radius until S_i(B) ⊂ B.
    int m = 0;
    while (std::pow(static_cast<double>(path.size()), m + 1) < 200) ++m;
    const Polyline coarse = iterate(path, m).polyline;
    const Box box = bounds(coarse);
    InvariantBall b;
    for (std::size_t i = 0; i < box.lo.size(); ++i) b.center.push_back(0.5 * (box.lo[i] + box.hi[i]));
    for (std::size_t i = 0; i < coarse.size(); ++i) b.radius = std::max(b.radius, dist(coarse.point(i), b.center));
    for (const auto& mp : path.numeric()) b.radius = std::max(b.radius, dist(mp(b.center), b.center) / (1.0 - mp.ratio));
    b.radius *= 1 + 1e-12;
    return b;
}

namespace detail {

inline Polyline transform(const AffineMap& g, const Polyline& p) {
    Polyline out(p.dim);
    out.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out.push(g(p.point(i)));
    return out;
}

/// Integer data of a system whose maps are x ↦ (1/q)·A_i x + B_i/L with A_i integer orthogonal matrices,
/// B_i integer vectors and one common q. Relative maps S_σ⁻¹∘S_τ between same-length words are then
/// x ↦ M x + t/L with M integer orthogonal and t integer.
struct LatticeSystem {
    int n = 0;
    std::int64_t q = 0, L = 1;
    std::vector<std::vector<std::int64_t>> a, b;  // per map: n×n row-major A_i, translation·L
};

inline std::optional<LatticeSystem> lattice_system(const IfsPath& path) {
    if (!path.is_exact()) return std::nullopt;
    LatticeSystem ls;
    ls.n = path.dim();
    const Rational r = path.maps().front().ratio().rational();
    if (boost::multiprecision::numerator(r) != 1) return std::nullopt;
    ls.q = boost::multiprecision::denominator(r).convert_to<std::int64_t>();
    BigInt L = 1;
    for (const auto& s : path.maps()) {
        if (s.ratio().rational() != r) return std::nullopt;
        for (const auto& e : matrix_of(s.orthogonal()))
            if (!e.is_exact() || boost::multiprecision::denominator(e.rational()) != 1) return std::nullopt;
        for (const auto& e : s.translation()) L = boost::multiprecision::lcm(L, boost::multiprecision::denominator(e.rational()));
    }
    if (L > 1'000'000'000) return std::nullopt;
    ls.L = L.convert_to<std::int64_t>();
    for (const auto& s : path.maps()) {
        std::vector<std::int64_t> m, t;
        for (const auto& e : matrix_of(s.orthogonal())) m.push_back(boost::multiprecision::numerator(e.rational()).convert_to<std::int64_t>());
        for (const auto& e : s.translation()) {
            Rational v = e.rational() * ls.L;
            t.push_back(boost::multiprecision::numerator(v).convert_to<std::int64_t>());
        }
        ls.a.push_back(std::move(m));
        ls.b.push_back(std::move(t));
    }
    return ls;
}

/// Recursion over neighbour configurations. A configuration of a word σ is the sorted list of relative
/// maps S_σ⁻¹∘S_τ over the same-length words τ whose pieces can still hold the nearest target of a point
/// of σ's piece; values are computed in σ's frame and scaled by r_σ = q^-|σ| on the way up.
class ConfigurationSearch {
public:
    // A relative map, flattened as n×n matrix entries followed by n scaled translation entries.
    using Rel = std::vector<std::int64_t>;
    using Config = std::vector<Rel>;

    ConfigurationSearch(const IfsPath& path, LatticeSystem ls, int k, double h1_upper)
        : ls_(std::move(ls)), k_(k), h1_(h1_upper), ball_(invariant_ball(path)), rmax_(path.max_ratio()) {
        i0_ = unit_segment(path.dim());
        a1_ = hutchinson_step(path.numeric(), i0_);
    }

    double run() {
        Rel id(static_cast<std::size_t>(ls_.n * ls_.n + ls_.n), 0);
        for (int i = 0; i < ls_.n; ++i) id[static_cast<std::size_t>(i * ls_.n + i)] = 1;
        return value(0, Config{id});
    }

    std::size_t configurations() const { return memo_.size(); }

private:
    double value(int j, const Config& config) {
        auto key = std::make_pair(j, config);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        double v = 0;
        if (j == k_) {
            v = leaf(config);
        } else {
            for (std::size_t i = 0; i < ls_.a.size(); ++i) v = std::max(v, value(j + 1, child(j, config, i)) / static_cast<double>(ls_.q));
        }
        memo_.emplace(std::move(key), v);
        return v;
    }

    AffineMap numeric(const Rel& g) const {
        const int n = ls_.n;
        AffineMap a = AffineMap::identity(n);
        for (int i = 0; i < n * n; ++i) a.m[static_cast<std::size_t>(i)] = static_cast<double>(g[static_cast<std::size_t>(i)]);
        for (int i = 0; i < n; ++i) a.b[static_cast<std::size_t>(i)] = static_cast<double>(g[static_cast<std::size_t>(n * n + i)]) / static_cast<double>(ls_.L);
        return a;
    }

    // S_i⁻¹∘G∘S_l: M' = A_iᵀ M A_l and t' = q·A_iᵀ(M B_l + t − B_i).
    Rel relative(const Rel& g, std::size_t i, std::size_t l) const {
        const int n = ls_.n;
        const auto& ai = ls_.a[i];
        const auto& al = ls_.a[l];
        Rel out(g.size(), 0);
        std::vector<std::int64_t> ma(static_cast<std::size_t>(n * n), 0), u(static_cast<std::size_t>(n), 0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                for (int k = 0; k < n; ++k) ma[static_cast<std::size_t>(r * n + c)] += g[static_cast<std::size_t>(r * n + k)] * al[static_cast<std::size_t>(k * n + c)];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(r * n + c)] += ai[static_cast<std::size_t>(k * n + r)] * ma[static_cast<std::size_t>(k * n + c)];
        for (int r = 0; r < n; ++r) {
            std::int64_t v = g[static_cast<std::size_t>(n * n + r)] - ls_.b[i][static_cast<std::size_t>(r)];
            for (int k = 0; k < n; ++k) v += g[static_cast<std::size_t>(r * n + k)] * ls_.b[l][static_cast<std::size_t>(k)];
            u[static_cast<std::size_t>(r)] = v;
        }
        for (int r = 0; r < n; ++r) {
            std::int64_t v = 0;
            for (int k = 0; k < n; ++k) v += ai[static_cast<std::size_t>(k * n + r)] * u[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(n * n + r)] = ls_.q * v;
        }
        return out;
    }

    Config child(int j, const Config& config, std::size_t i) const {
        // Targets that can matter below level j+1 lie within rmax^(k-j-1)·h1 of the query piece (child frame).
        const double reach = std::pow(rmax_, k_ - j - 1) * h1_ * (1 + 1e-9) + 1e-12;
        Config out;
        for (const auto& g : config)
            for (std::size_t l = 0; l < ls_.a.size(); ++l) {
                Rel gl = relative(g, i, l);
                const AffineMap a = numeric(gl);
                const double gap = dist(a(ball_.center), ball_.center) - 2.0 * ball_.radius;
                if (gap <= reach) out.push_back(std::move(gl));
            }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double leaf(const Config& config) const {
        // Forward: points of T(I) to the targets G(I); backward: points of I to the targets G(T(I)).
        std::vector<Polyline> fwd, bwd;
        for (const auto& g : config) {
            const AffineMap a = numeric(g);
            fwd.push_back(transform(a, i0_));
            bwd.push_back(transform(a, a1_));
        }
        auto to_set = [](const std::vector<Polyline>& targets) {
            return [&targets](std::span<const double> x) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& t : targets)
                    for (std::size_t s = 0; s < t.segments(); ++s) best = std::min(best, point_segment_distance(x, t.point(s), t.point(s + 1)));
                return best;
            };
        };
        const double step = 1.0 / 64;
        return std::max(sup_distance(a1_, step, to_set(fwd)), sup_distance(i0_, step, to_set(bwd)));
    }

    LatticeSystem ls_;
    int k_;
    double h1_;
    InvariantBall ball_;
    double rmax_;
    Polyline i0_, a1_;
    std::map<std::pair<int, Config>, double> memo_;
};

inline bool fixes_unit_segment(const IfsPath& path) {
    const int n = path.dim();
    auto on_segment = [&](const Point& v) {
        if (!is_exact(v)) return false;
        for (int c = 1; c < n; ++c)
            if (v[static_cast<std::size_t>(c)].rational() != 0) return false;
        return v[0].rational() >= 0 && v[0].rational() <= 1;
    };
    Point e1(static_cast<std::size_t>(n), Scalar(0));
    e1[0] = Scalar(1);
    const Point zero(static_cast<std::size_t>(n), Scalar(0));
    const auto& maps = path.maps();
    for (const auto& s : maps)
        if (!on_segment(image(s, zero)) || !on_segment(image(s, e1))) return false;
    for (std::size_t i = 0; i + 1 < maps.size(); ++i)
        if (!(image(maps[i], e1)[0] == image(maps[i + 1], zero)[0])) return false;
    return image(maps.front(), zero)[0].rational() == 0 && image(maps.back(), e1)[0].rational() == 1;
}

}  // namespace detail

/// d_H(T^{k+1}(I), T^k(I)). Explicit polylines are used while N^{k+1} fits the budget. Exact systems with
/// exactly representable linear parts switch, beyond 10^5 points, to a memoised recursion over neighbour
/// configurations, which never materialises the polylines.
inline SuccessiveDistance successive_hausdorff(const IfsPath& path, int k, std::size_t budget = default_point_budget) {
    if (k < 0) throw InvalidInput("generation must be non-negative");
    // Exact generation-1 vertices on I that chain from 0 to e1 cover I, so T(I) = I and every distance is 0.
    if (detail::fixes_unit_segment(path)) return {k, 0.0, false, 0};
    const double pts = std::pow(static_cast<double>(path.size()), k + 1) + 1.0;
    // Lattice systems switch early: space-filling polylines make the explicit distance slow.
    auto ls = pts > 1e5 ? detail::lattice_system(path) : std::nullopt;
    if (!ls && pts <= static_cast<double>(budget)) {
        ApproxCurve c = iterate(path, k, budget);
        Polyline next = hutchinson_step(path.numeric(), c.polyline);
        return {k, hausdorff(next, c.polyline), false, 0};
    }
    if (!ls)
        throw BudgetError("generation " + std::to_string(k + 1) +
                          " exceeds the point budget and the maps are not lattice maps with one common ratio 1/q");
    detail::ConfigurationSearch search(path, std::move(*ls), k, first_step_distance(path).upper);
    const double v = search.run();
    return {k, v, true, search.configurations()};
}

/// Same quantity by the configuration recursion regardless of budget; exact systems only.
inline SuccessiveDistance successive_hausdorff_by_configurations(const IfsPath& path, int k) {
    auto ls = detail::lattice_system(path);
    if (!ls) throw InvalidInput("configuration recursion needs lattice maps with one common ratio 1/q");
    detail::ConfigurationSearch search(path, std::move(*ls), k, first_step_distance(path).upper);
    const double v = search.run();
    return {k, v, true, search.configurations()};
}

}  // namespace ifsarc
