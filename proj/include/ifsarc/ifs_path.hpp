#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "polyline.hpp"
#include "report.hpp"
#include "similarity.hpp"

namespace ifsarc {

inline constexpr std::size_t default_point_budget = 10'000'000;

/// Ordered list of N ≥ 2 contracting similarities in a common dimension.
class IfsPath {
public:
    explicit IfsPath(std::vector<Similarity> maps, bool normalized = false) : maps_(std::move(maps)), normalized_(normalized) {
        if (maps_.size() < 2) throw InvalidInput("an IFS path needs at least two maps");
        for (const auto& s : maps_)
            if (s.dim() != maps_.front().dim()) throw DimensionError("maps of an IFS path must share one dimension");
    }

    std::size_t size() const noexcept { return maps_.size(); }
    int dim() const noexcept { return maps_.front().dim(); }
    bool normalized() const noexcept { return normalized_; }
    const std::vector<Similarity>& maps() const noexcept { return maps_; }
    const Similarity& map(int letter) const { return maps_.at(static_cast<std::size_t>(letter - 1)); }

    bool is_exact() const {
        return std::all_of(maps_.begin(), maps_.end(), [](const Similarity& s) { return s.is_exact(); });
    }

    std::vector<AffineMap> numeric() const {
        std::vector<AffineMap> out;
        for (const auto& s : maps_) out.push_back(s.numeric());
        return out;
    }

    std::vector<double> ratios() const {
        std::vector<double> out;
        for (const auto& s : maps_) out.push_back(s.ratio().to_double());
        return out;
    }

    double max_ratio() const {
        auto r = ratios();
        return *std::max_element(r.begin(), r.end());
    }

private:
    std::vector<Similarity> maps_;
    bool normalized_;
};

/// Result of word_map for the empty word: the identity, which is not a contracting similarity.
struct Identity {};
using WordMap = std::variant<Identity, Similarity>;

inline void check_word(const IfsPath& path, const Word& w) {
    for (int l : w.letters)
        if (l < 1 || static_cast<std::size_t>(l) > path.size())
            throw InvalidInput("letter " + std::to_string(l) + " outside 1.." + std::to_string(path.size()));
}

/// S_σ = S_{σ1} ∘ … ∘ S_{σm}.
inline WordMap word_map(const IfsPath& path, const Word& w) {
    check_word(path, w);
    if (w.empty()) return Identity{};
    Similarity s = path.map(w.letters.back());
    for (auto it = w.letters.rbegin() + 1; it != w.letters.rend(); ++it) s = compose(path.map(*it), s);
    return s;
}

inline Point image(const WordMap& m, const Point& p) {
    if (const auto* s = std::get_if<Similarity>(&m)) return image(*s, p);
    return p;
}

inline AffineMap word_affine(const IfsPath& path, const std::vector<AffineMap>& maps, const Word& w) {
    check_word(path, w);
    AffineMap a = AffineMap::identity(path.dim());
    for (int l : w.letters) a = a.then_inner(maps[static_cast<std::size_t>(l - 1)]);
    return a;
}

inline double word_ratio(const IfsPath& path, const Word& w) {
    check_word(path, w);
    double r = 1;
    for (int l : w.letters) r *= path.map(l).ratio().to_double();
    return r;
}

struct Endpoints {
    Point a, b;
};

inline Endpoints endpoints(const IfsPath& path) { return {fixed_point(path.maps().front()), fixed_point(path.maps().back())}; }

/// Checks the endpoint-chaining conditions S_i(b) = S_{i+1}(a).
inline AnalysisReport validate_path(const IfsPath& path) {
    AnalysisReport r{"validate", Verdict::Pass, {}, {}};
    const auto [a, b] = endpoints(path);
    const double ab = distance(a, b);
    const double tol = 1e-12 * (ab > 0 ? ab : 1.0);
    r.set("maps", static_cast<std::int64_t>(path.size()));
    r.set("dimension", path.dim());
    r.set("endpoint_distance", ab, is_exact(a) && is_exact(b) ? Provenance::Exact : Provenance::Numeric);
    if (ab == 0) {
        r.verdict = Verdict::Fail;
        r.set("defect", "endpoints coincide");
    }
    double worst = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Point left = image(path.maps()[i], b);
        const Point right = image(path.maps()[i + 1], a);
        const bool exact = is_exact(left) && is_exact(right);
        double res = 0;
        if (exact) {
            Rational sq = 0;
            for (std::size_t c = 0; c < left.size(); ++c) sq += (left[c].rational() - right[c].rational()) * (left[c].rational() - right[c].rational());
            res = std::sqrt(rational_to_double(sq));
        } else {
            res = distance(left, right);
        }
        const bool ok = exact ? left == right : res <= tol;
        worst = std::max(worst, res);
        if (!ok) {
            r.verdict = Verdict::Fail;
            r.set("chain(" + std::to_string(i + 1) + "," + std::to_string(i + 2) + ")_residual", res,
                  exact ? Provenance::Exact : Provenance::Numeric);
        }
    }
    r.set("max_chain_residual", worst);
    r.set("tolerance", tol);
    return r;
}

namespace detail {
/// Angle of the planar vector (x, y); exact when it is a multiple of an eighth turn.
inline Rotation2 argument(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) {
        const Rational& u = x.rational();
        const Rational& v = y.rational();
        if (v == 0) return Rotation2::turns(u > 0 ? 0 : 1, 2);
        if (u == 0) return Rotation2::turns(v > 0 ? 1 : 3, 4);
        if (u == v) return Rotation2::turns(u > 0 ? 1 : 5, 8);
        if (u == -v) return Rotation2::turns(u > 0 ? 7 : 3, 8);
        // tan is rational and not in {0, ±1}, so the angle is not a rational number of turns.
        return Rotation2::opaque("arg(" + x.to_string() + "," + y.to_string() + ")", std::atan2(y.to_double(), x.to_double()), true);
    }
    return Rotation2::opaque("arg(" + x.to_string() + "," + y.to_string() + ")", std::atan2(y.to_double(), x.to_double()), false);
}
}  // namespace detail

/// Conjugates every map by the similarity Φ with Φ(a) = 0, Φ(b) = e1.
inline IfsPath normalize(const IfsPath& path) {
    const auto [a, b] = endpoints(path);
    const int n = path.dim();
    Point w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
    if (distance(a, b) == 0) throw DegenerateError("endpoints coincide; the path cannot be normalized");
    // Already in normal position: keep the maps as they are so exact data is not disturbed by round-off.
    if (distance(a, origin(n)) <= 1e-15 && distance(b, unit_e1(n)) <= 1e-15) return IfsPath(path.maps(), true);

    std::vector<Similarity> out;
    if (n == 1) {
        for (const auto& s : path.maps()) {
            Point d = image(s, a);
            Scalar t = (d[0] - a[0]) / w[0];
            out.emplace_back(s.ratio(), s.orthogonal(), Point{t});
        }
    } else if (n == 2) {
        // Φ(x) = conj(w)·(x − a)/|w|² in complex notation; rational when the inputs are.
        const Scalar norm2 = w[0] * w[0] + w[1] * w[1];
        const Rotation2 beta = detail::argument(w[0], w[1]);
        const OrthogonalPart rot{PlanarOrthogonal{beta, false}};
        const OrthogonalPart rot_inv{PlanarOrthogonal{-beta, false}};
        for (const auto& s : path.maps()) {
            Point d = image(s, a);
            const Scalar dx = d[0] - a[0], dy = d[1] - a[1];
            Point t{(w[0] * dx + w[1] * dy) / norm2, (w[0] * dy - w[1] * dx) / norm2};
            out.emplace_back(s.ratio(), compose(compose(rot_inv, s.orthogonal()), rot), std::move(t));
        }
    } else {
        // Φ(x) = Q(x − a)/|w| with Q a Householder reflection taking w/|w| to e1.
        const double len = distance(a, b);
        bool aligned = w[0].to_double() > 0;
        for (int i = 1; i < n; ++i) aligned = aligned && w[static_cast<std::size_t>(i)].to_double() == 0;
        std::vector<Scalar> q(static_cast<std::size_t>(n * n), Scalar(0));
        Scalar scale;
        if (aligned) {
            for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i * n + i)] = 1;
            scale = w[0];
        } else {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)].to_double() / len;
            v[0] -= 1.0;
            double vv = 0;
            for (double x : v) vv += x * x;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    q[static_cast<std::size_t>(i * n + j)] =
                        Scalar::approx((i == j ? 1.0 : 0.0) - 2.0 * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] / vv);
            scale = Scalar::approx(len);
        }
        OrthogonalPart qo{make_matrix_orthogonal(n, q)};
        OrthogonalPart qt = inverse(qo);
        for (const auto& s : path.maps()) {
            Point d = image(s, a);
            for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = (d[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]) / scale;
            Point t = detail::mat_vec(matrix_of(qo), d);
            out.emplace_back(s.ratio(), compose(compose(qo, s.orthogonal()), qt), std::move(t));
        }
    }
    return IfsPath(std::move(out), true);
}

/// True when a = 0 and b = e1, exactly or within 1e-12.
inline bool is_normalized(const IfsPath& path) {
    const auto [a, b] = endpoints(path);
    const int n = path.dim();
    return distance(a, origin(n)) <= 1e-12 && distance(b, unit_e1(n)) <= 1e-12;
}

inline Polyline unit_segment(int n) {
    Polyline p(n);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    p.push(x);
    x[0] = 1.0;
    p.push(x);
    return p;
}

/// Applies the Hutchinson operator to a polyline from 0 to e1: the ordered concatenation of S_i(P),
/// each copy after the first dropping its (shared) starting point.
inline Polyline hutchinson_step(const std::vector<AffineMap>& maps, const Polyline& p) {
    Polyline out(p.dim);
    out.reserve(maps.size() * (p.size() - 1) + 1);
    std::vector<double> y(static_cast<std::size_t>(p.dim));
    for (std::size_t i = 0; i < maps.size(); ++i)
        for (std::size_t j = (i == 0 ? 0 : 1); j < p.size(); ++j) {
            maps[i].apply(p.point(j), y);
            out.push(y);
        }
    return out;
}

/// d_H(T(I), I): a refined estimate and a certified upper bound.
struct FirstStepDistance {
    double estimate = 0;
    double upper = 0;
};

inline FirstStepDistance first_step_distance(const IfsPath& path) {
    const Polyline i0 = unit_segment(path.dim());
    const Polyline i1 = hutchinson_step(path.numeric(), i0);
    const double step = 1e-5 * std::max(1.0, bounds(i1).diagonal());
    const double h = hausdorff(i0, i1, step);
    // Distances to a fixed set are 1-Lipschitz, so no point between samples exceeds the best sample by more than half a step.
    return {h, h + 0.5 * step + 1e-15};
}

/// T^k(I) together with an upper bound on its Hausdorff distance to the invariant set.
struct ApproxCurve {
    int generation = 0;
    std::size_t maps = 0;
    Polyline polyline;
    double error_bound = 0;
};

inline double curve_error_bound(double rmax, int k, double dh1_upper) {
    return std::pow(rmax, k) * dh1_upper / (1.0 - rmax);
}

inline std::size_t checked_points(std::size_t n_maps, int k, std::size_t budget) {
    double pts = std::pow(static_cast<double>(n_maps), k) + 1.0;
    if (k < 0) throw InvalidInput("generation must be non-negative");
    if (pts > static_cast<double>(budget))
        throw BudgetError("generation " + std::to_string(k) + " needs " + format_real(pts, 6) + " points, over the budget of " +
                          std::to_string(budget));
    return static_cast<std::size_t>(pts);
}

inline ApproxCurve iterate(const IfsPath& path, int k, std::size_t budget = default_point_budget) {
    checked_points(path.size(), k, budget);
    const auto maps = path.numeric();
    Polyline p = unit_segment(path.dim());
    for (int g = 0; g < k; ++g) p = hutchinson_step(maps, p);
    return {k, path.size(), std::move(p), curve_error_bound(path.max_ratio(), k, first_step_distance(path).upper)};
}

/// Vertex index j of T^m(I) as an address: S_σ(0) with σ the base-N digits of j, or S_{N…N}(e1) for j = N^m.
inline std::pair<Word, bool> vertex_address(std::size_t n_maps, int m, std::size_t j) {
    Word w;
    w.letters.assign(static_cast<std::size_t>(m), 0);
    std::size_t total = 1;
    for (int i = 0; i < m; ++i) total *= n_maps;
    if (j == total) {
        std::fill(w.letters.begin(), w.letters.end(), static_cast<int>(n_maps));
        return {w, true};
    }
    for (int i = m - 1; i >= 0; --i) {
        w.letters[static_cast<std::size_t>(i)] = static_cast<int>(j % n_maps) + 1;
        j /= n_maps;
    }
    return {w, false};
}

struct Vertex {
    Word address;
    bool at_e1 = false;  // address maps e1 (true) or the origin (false)
    Point point;
};

struct VertexSet {
    int generation = 0;
    std::vector<Vertex> points;
};

/// Distinct generation-m vertices S_σ(0), S_σ(e1). Exact systems are enumerated exactly, others in floating point
/// with coincidences merged at 1e-12 of the endpoint distance.
inline VertexSet vertices(const IfsPath& path, int m, std::size_t budget = default_point_budget) {
    const std::size_t count = checked_points(path.size(), m, budget);
    VertexSet vs{m, {}};
    const int n = path.dim();
    bool exact = path.is_exact();
    for (const auto& s : path.maps()) {
        const auto lin = s.linear();
        exact = exact && std::all_of(lin.begin(), lin.end(), [](const Scalar& v) { return v.is_exact(); });
    }
    if (exact) {
        // Exact points in order, built copy by copy like the polyline.
        std::vector<Point> pts{origin(n), unit_e1(n)};
        for (int g = 0; g < m; ++g) {
            std::vector<Point> next;
            next.reserve(path.size() * (pts.size() - 1) + 1);
            for (std::size_t i = 0; i < path.size(); ++i)
                for (std::size_t j = (i == 0 ? 0 : 1); j < pts.size(); ++j) next.push_back(image(path.maps()[i], pts[j]));
            pts = std::move(next);
        }
        std::map<std::vector<std::string>, bool> seen;
        for (std::size_t j = 0; j < count; ++j) {
            std::vector<std::string> key;
            for (const auto& c : pts[j]) key.push_back(c.to_string());
            if (!seen.emplace(std::move(key), true).second) continue;
            auto [w, e1] = vertex_address(path.size(), m, j);
            vs.points.push_back({std::move(w), e1, pts[j]});
        }
        return vs;
    }
    ApproxCurve c = iterate(path, m, budget);
    const auto [a, b] = endpoints(path);
    const double tol = 1e-12 * std::max(distance(a, b), 1e-300);
    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> cells;
    const double cell = std::max(tol * 16, 1e-12);
    for (std::size_t j = 0; j < count; ++j) {
        auto p = c.polyline.point(j);
        std::vector<std::int64_t> key(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(p[static_cast<std::size_t>(i)] / cell));
        bool dup = false;
        // Neighbouring cells too, so coincidences straddling a cell border are still found.
        std::vector<std::int64_t> off(static_cast<std::size_t>(n), -1);
        while (!dup) {
            std::vector<std::int64_t> k2 = key;
            for (int i = 0; i < n; ++i) k2[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
            if (auto it = cells.find(k2); it != cells.end())
                for (std::size_t q : it->second)
                    if (dist(p, c.polyline.point(q)) <= tol) dup = true;
            std::size_t i = 0;
            while (i < off.size() && off[i] == 1) off[i] = -1, ++i;
            if (i == off.size()) break;
            ++off[i];
        }
        if (dup) continue;
        cells[key].push_back(j);
        auto [w, e1] = vertex_address(path.size(), m, j);
        Point pt;
        for (double v : p) pt.push_back(Scalar::approx(v));
        vs.points.push_back({std::move(w), e1, std::move(pt)});
    }
    return vs;
}

}  // namespace ifsarc
