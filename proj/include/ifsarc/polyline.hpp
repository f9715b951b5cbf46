#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace ifsarc {

/// Ordered point list with flat storage: point i occupies coords[i*dim .. i*dim+dim).
struct Polyline {
    int dim = 2;
    std::vector<double> coords;

    Polyline() = default;
    explicit Polyline(int n) : dim(n) {}

    std::size_t size() const noexcept { return coords.size() / static_cast<std::size_t>(dim); }
    std::size_t segments() const noexcept { return size() < 2 ? 0 : size() - 1; }
    bool empty() const noexcept { return coords.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    void push(std::span<const double> p) { coords.insert(coords.end(), p.begin(), p.end()); }
    void reserve(std::size_t points) { coords.reserve(points * static_cast<std::size_t>(dim)); }

    friend bool operator==(const Polyline&, const Polyline&) = default;
};

struct Box {
    std::vector<double> lo, hi;

    static Box empty(int n) {
        return {std::vector<double>(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity()),
                std::vector<double>(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity())};
    }
    void extend(std::span<const double> p) {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    void extend(const Box& b) {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = std::min(lo[i], b.lo[i]);
            hi[i] = std::max(hi[i], b.hi[i]);
        }
    }
    double diagonal() const {
        double s = 0;
        for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
        return std::sqrt(s);
    }
};

/// Smallest distance between two boxes (0 when they overlap).
inline double box_distance(const Box& a, const Box& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        double g = std::max({0.0, a.lo[i] - b.hi[i], b.lo[i] - a.hi[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

inline Box bounds(const Polyline& p, std::size_t first = 0, std::size_t last = std::numeric_limits<std::size_t>::max()) {
    Box b = Box::empty(p.dim);
    last = std::min(last, p.size() - 1);
    for (std::size_t i = first; i <= last; ++i) b.extend(p.point(i));
    return b;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Exact diameter of a point set by brute force; fine for the small sets it is used on.
inline double diameter(const Polyline& p) {
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) d = std::max(d, dist(p.point(i), p.point(j)));
    return d;
}

inline double point_segment_distance(std::span<const double> x, std::span<const double> a, std::span<const double> b) {
    double ab2 = 0, t = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = b[i] - a[i];
        ab2 += d * d;
        t += (x[i] - a[i]) * d;
    }
    t = ab2 > 0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = a[i] + t * (b[i] - a[i]) - x[i];
        s += c * c;
    }
    return std::sqrt(s);
}

/// Minimum distance between segments [p1,q1] and [p2,q2] in any dimension.
inline double segment_segment_distance(std::span<const double> p1, std::span<const double> q1, std::span<const double> p2,
                                       std::span<const double> q2) {
    const std::size_t n = p1.size();
    double a = 0, e = 0, f = 0, b = 0, c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = q1[i] - p1[i], d2 = q2[i] - p2[i], r = p1[i] - p2[i];
        a += d1 * d1;
        e += d2 * d2;
        f += d2 * r;
        b += d1 * d2;
        c += d1 * r;
    }
    double s = 0, t = 0;
    constexpr double eps = 1e-300;
    if (a <= eps && e <= eps) {
        s = t = 0;
    } else if (a <= eps) {
        s = 0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else if (e <= eps) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else {
        const double denom = a * e - b * b;
        s = denom > 1e-18 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
        t = (b * s + f) / e;
        if (t < 0) {
            t = 0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else if (t > 1) {
            t = 1;
            s = std::clamp((b - c) / a, 0.0, 1.0);
        }
    }
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = p1[i] + s * (q1[i] - p1[i]) - p2[i] - t * (q2[i] - p2[i]);
        d2 += u * u;
    }
    // The closed form can miss by round-off in degenerate (parallel) cases; endpoint checks bound it.
    double d = std::sqrt(d2);
    d = std::min({d, point_segment_distance(p1, p2, q2), point_segment_distance(q1, p2, q2), point_segment_distance(p2, p1, q1),
                  point_segment_distance(q2, p1, q1)});
    return d;
}

/// Uniform hash grid over the segments of one or more polylines, for nearest-segment queries.
class SegmentGrid {
public:
    SegmentGrid(const Polyline& line, double cell = 0) : line_(&line) {
        const std::size_t m = line.segments();
        if (m == 0) throw InvalidInput("segment grid needs at least one segment");
        Box b = bounds(line);
        if (cell <= 0) {
            double total = 0;
            for (std::size_t i = 0; i < m; ++i) total += dist(line.point(i), line.point(i + 1));
            cell = std::max(total / static_cast<double>(m) * 2.0, b.diagonal() * 1e-9 + 1e-300);
        }
        cell_ = cell;
        origin_ = b.lo;
        std::vector<std::int64_t> lo(static_cast<std::size_t>(line.dim)), hi(lo.size()), c(lo.size());
        for (std::size_t s = 0; s < m; ++s) {
            auto p = line.point(s), q = line.point(s + 1);
            for (std::size_t i = 0; i < lo.size(); ++i) {
                lo[i] = index(std::min(p[i], q[i]), i);
                hi[i] = index(std::max(p[i], q[i]), i);
            }
            c = lo;
            while (true) {
                cells_[key(c)].push_back(static_cast<std::uint32_t>(s));
                std::size_t i = 0;
                while (i < c.size() && c[i] == hi[i]) c[i] = lo[i], ++i;
                if (i == c.size()) break;
                ++c[i];
            }
        }
        b_ = b;
    }

    /// Distance from x to the polyline, with the index of a nearest segment.
    std::pair<double, std::size_t> nearest(std::span<const double> x) const {
        const std::size_t n = x.size();
        std::vector<std::int64_t> center(n);
        for (std::size_t i = 0; i < n; ++i) center[i] = index(x[i], i);
        // Distance from x to the box, to know when rings can stop.
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        const std::int64_t max_ring = max_ring_for(x);
        std::vector<std::int64_t> off(n);
        for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
            // Every point in ring R is at least (R-1)·cell away from x.
            if (ring >= 1 && static_cast<double>(ring - 1) * cell_ > best) break;
            std::fill(off.begin(), off.end(), -ring);
            while (true) {
                std::int64_t mx = 0;
                for (auto o : off) mx = std::max<std::int64_t>(mx, std::abs(o));
                if (mx == ring) {
                    std::vector<std::int64_t> c(n);
                    for (std::size_t i = 0; i < n; ++i) c[i] = center[i] + off[i];
                    auto it = cells_.find(key(c));
                    if (it != cells_.end())
                        for (std::uint32_t s : it->second) {
                            double d = point_segment_distance(x, line_->point(s), line_->point(s + 1));
                            if (d < best) best = d, arg = s;
                        }
                }
                std::size_t i = 0;
                while (i < n && off[i] == ring) off[i] = -ring, ++i;
                if (i == n) break;
                ++off[i];
            }
        }
        return {best, arg};
    }

    double distance(std::span<const double> x) const { return nearest(x).first; }

private:
    std::int64_t index(double v, std::size_t axis) const { return static_cast<std::int64_t>(std::floor((v - origin_[axis]) / cell_)); }

    std::int64_t max_ring_for(std::span<const double> x) const {
        double far = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            far = std::max({far, std::abs(x[i] - b_.lo[i]), std::abs(x[i] - b_.hi[i])});
        return static_cast<std::int64_t>(far / cell_) + 2;
    }

    static std::uint64_t key(const std::vector<std::int64_t>& c) {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : c) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

    const Polyline* line_;
    double cell_ = 1;
    std::vector<double> origin_;
    Box b_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

namespace detail {
template <class DistFn>
double golden_max(std::span<const double> a, std::span<const double> b, double lo, double hi, DistFn&& d) {
    const std::size_t n = a.size();
    std::vector<double> x(n);
    auto at = [&](double t) {
        for (std::size_t i = 0; i < n; ++i) x[i] = a[i] + t * (b[i] - a[i]);
        return d(std::span<const double>(x));
    };
    constexpr double g = 0.6180339887498949;
    double c1 = hi - g * (hi - lo), c2 = lo + g * (hi - lo);
    double f1 = at(c1), f2 = at(c2);
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        if (f1 > f2) {
            hi = c2, c2 = c1, f2 = f1;
            c1 = hi - g * (hi - lo), f1 = at(c1);
        } else {
            lo = c1, c1 = c2, f1 = f2;
            c2 = lo + g * (hi - lo), f2 = at(c2);
        }
    }
    return std::max(f1, f2);
}
}  // namespace detail

/// sup over the points of `from` of d(x), where d is a distance-to-set function (hence 1-Lipschitz).
/// Every segment is sampled at spacing `step`; segments whose samples leave room for a larger value
/// are refined by a golden-section search around their best sample.
template <class DistFn>
double sup_distance(const Polyline& from, double step, DistFn&& d) {
    if (from.size() == 1) return d(from.point(0));
    struct Best {
        double value, t, h;
    };
    std::vector<Best> per(from.segments());
    std::vector<double> x(static_cast<std::size_t>(from.dim));
    double best = 0;
    for (std::size_t s = 0; s < from.segments(); ++s) {
        auto a = from.point(s), b = from.point(s + 1);
        const double len = dist(a, b);
        const int samples = std::max(2, static_cast<int>(std::ceil(len / step)) + 1);
        Best bs{-1, 0, 1.0 / (samples - 1)};
        for (int k = (s == 0 ? 0 : 1); k < samples; ++k) {
            const double t = static_cast<double>(k) / (samples - 1);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = a[i] + t * (b[i] - a[i]);
            const double v = d(std::span<const double>(x));
            if (v > bs.value) bs.value = v, bs.t = t;
        }
        per[s] = bs;
        best = std::max(best, bs.value);
    }
    for (std::size_t s = 0; s < from.segments(); ++s) {
        const double len = dist(from.point(s), from.point(s + 1));
        if (per[s].value + 0.5 * per[s].h * len <= best) continue;
        const double lo = std::max(0.0, per[s].t - per[s].h), hi = std::min(1.0, per[s].t + per[s].h);
        best = std::max(best, detail::golden_max(from.point(s), from.point(s + 1), lo, hi, d));
    }
    return best;
}

/// sup over points of `from` of the distance to `to`.
inline double directed_hausdorff(const Polyline& from, const Polyline& to, double step) {
    if (from.dim != to.dim) throw DimensionError("polylines of different dimension");
    if (to.size() == 1) {
        double h = 0;
        for (std::size_t i = 0; i < from.size(); ++i) h = std::max(h, dist(from.point(i), to.point(0)));
        return h;
    }
    if (to.segments() <= 64) {
        return sup_distance(from, step, [&](std::span<const double> x) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < to.segments(); ++s) best = std::min(best, point_segment_distance(x, to.point(s), to.point(s + 1)));
            return best;
        });
    }
    SegmentGrid grid(to);
    return sup_distance(from, step, [&](std::span<const double> x) { return grid.distance(x); });
}

/// Hausdorff distance between two polylines (as compact sets). Sampling spacing defaults to 1e-3 of the
/// larger bounding-box diagonal.
inline double hausdorff(const Polyline& a, const Polyline& b, double step = 0) {
    if (step <= 0) step = 1e-3 * std::max(bounds(a).diagonal(), bounds(b).diagonal());
    if (step <= 0) step = 1e-300;
    return std::max(directed_hausdorff(a, b, step), directed_hausdorff(b, a, step));
}

}  // namespace ifsarc
