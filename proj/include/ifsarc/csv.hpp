#pragma once

#include <random>
#include <string>

#include "hutchinson.hpp"
#include "report.hpp"

namespace ifsarc {

/// Uniform samples t = j/(count − 1) of the Hutchinson parameterization: t, x1..xn, error.
inline std::string phi_samples_csv(const IfsPath& path, std::size_t count, double tol = 1e-10) {
    if (count < 2) throw InvalidInput("need at least two samples");
    const Parameterization phi(path);
    std::string s = "t";
    for (int k = 1; k <= path.dim(); ++k) s += ",x" + std::to_string(k);
    s += ",error\n";
    for (std::size_t j = 0; j < count; ++j) {
        const Rational t = make_rational(static_cast<std::int64_t>(j), static_cast<std::int64_t>(count - 1));
        const ParamPoint p = phi.eval(t, tol);
        s += format_real(rational_to_double(t), 17);
        for (double x : p.value) s += "," + format_real(x, 17);
        s += "," + format_real(p.error, 6) + "\n";
    }
    return s;
}

/// Random pairs of generation-g vertices with their parameters: u, v, distance, t-gap, and
/// distance / (t-gap)^{1/s}, the quantity bounded by the Hölder estimates.
inline std::string holder_scatter_csv(const IfsPath& path, int g, std::size_t pairs, std::uint64_t seed = 1,
                                      std::size_t budget = default_point_budget) {
    const ApproxCurve c = iterate(path, g, budget);
    const Partition part = build_partition_only(path);
    const Polyline u = iterate(companion_ifs(part), g, budget).polyline;
    const std::size_t m = c.polyline.size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::string s = "u,v,distance,t-gap,ratio\n";
    for (std::size_t k = 0; k < pairs;) {
        std::size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        ++k;
        if (i > j) std::swap(i, j);
        const double tu = u.point(i)[0], tv = u.point(j)[0];
        const double d = distance(c.polyline.point(i), c.polyline.point(j));
        const double gap = tv - tu;
        s += format_real(tu, 17) + "," + format_real(tv, 17) + "," + format_real(d, 17) + "," + format_real(gap, 17) + "," +
             format_real(d / std::pow(gap, 1.0 / part.s), 17) + "\n";
    }
    return s;
}

}  // namespace ifsarc
