#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "ifs_path.hpp"

namespace ifsarc {

struct DimensionResult {
    double s = 0;
    double residual = 0;
    int iterations = 0;
};

/// Root of Σ r_i^s = 1: bisection on [0, log N / log(1/max r)] followed by a Newton polish.
inline DimensionResult similarity_dimension(const std::vector<double>& ratios) {
    if (ratios.size() < 2) throw InvalidInput("similarity dimension needs at least two ratios");
    for (double r : ratios)
        if (!(r > 0 && r < 1)) throw InvalidInput("ratios must lie in (0, 1)");
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    const double n = static_cast<double>(ratios.size());
    auto f = [&](double s) {
        double sum = 0;
        for (double r : ratios) sum += std::pow(r, s);
        return sum - 1.0;
    };
    auto df = [&](double s) {
        double sum = 0;
        for (double r : ratios) sum += std::pow(r, s) * std::log(r);
        return sum;
    };
    DimensionResult out;
    const bool equal = std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r == ratios.front(); });
    if (equal) {
        out.s = std::log(n) / std::log(1.0 / rmax);
        out.residual = std::abs(f(out.s));
        if (out.residual <= 1e-13) return out;
    }
    double lo = 0, hi = std::log(n) / std::log(1.0 / rmax);
    constexpr int cap = 200;
    int it = 0;
    // f is strictly decreasing with f(lo) = N − 1 > 0 and f(hi) ≤ 0.
    while (it < cap && hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
        ++it;
    }
    double s = 0.5 * (lo + hi);
    while (it < cap) {
        const double v = f(s);
        if (std::abs(v) <= 1e-15) break;
        const double next = std::clamp(s - v / df(s), lo, hi);
        ++it;
        if (next == s) break;
        s = next;
    }
    out.s = s;
    out.residual = std::abs(f(s));
    out.iterations = it;
    if (out.residual > 1e-13) throw Error("similarity dimension did not converge (residual " + format_real(out.residual, 3) + ")");
    return out;
}

inline DimensionResult similarity_dimension(const IfsPath& path) { return similarity_dimension(path.ratios()); }

/// Number of axis-aligned grid cells of side `scale` (grid anchored at the origin) met by the polyline.
inline std::size_t box_count(const Polyline& line, double scale) {
    struct Hash {
        std::size_t operator()(const std::vector<std::int64_t>& c) const noexcept {
            std::size_t h = 1469598103934665603ULL;
            for (auto v : c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
            return h;
        }
    };
    std::unordered_set<std::vector<std::int64_t>, Hash> cells;
    const std::size_t n = static_cast<std::size_t>(line.dim);
    std::vector<std::int64_t> c(n);
    std::vector<double> x(n);
    auto mark = [&](std::span<const double> p) {
        for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<std::int64_t>(std::floor(p[i] / scale));
        cells.insert(c);
    };
    if (line.size() == 1) mark(line.point(0));
    for (std::size_t s = 0; s < line.segments(); ++s) {
        auto a = line.point(s), b = line.point(s + 1);
        // Sample densely enough that consecutive samples cannot skip a cell the segment crosses through
        // more than a corner sliver of.
        const int m = std::max(1, static_cast<int>(std::ceil(8.0 * dist(a, b) / scale)));
        for (int k = 0; k <= m; ++k) {
            const double t = static_cast<double>(k) / m;
            for (std::size_t i = 0; i < n; ++i) x[i] = a[i] + t * (b[i] - a[i]);
            mark(x);
        }
    }
    return cells.size();
}

/// Least-squares slope of log(box count) against log(1/scale).
inline double box_dimension_estimate(const ApproxCurve& curve, const std::vector<double>& scales) {
    if (scales.size() < 3) throw InvalidInput("box counting needs at least three scales");
    const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
    if (*lo <= curve.error_bound)
        throw InvalidInput("scale " + format_real(*lo, 6) + " is not above the curve's error bound " + format_real(curve.error_bound, 6));
    if (std::log10(*hi / *lo) < 2.0 - 1e-12) throw InvalidInput("scales must span at least two decades");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(scales.size());
    for (double e : scales) {
        const double x = std::log(1.0 / e);
        const double y = std::log(static_cast<double>(box_count(curve.polyline, e)));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace ifsarc
