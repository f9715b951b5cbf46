#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "dimension.hpp"
#include "ifs_path.hpp"

namespace ifsarc {

/// Breakpoints 0 = t_0 < … < t_N = 1 with t_i − t_{i−1} = r_i^s.
struct Partition {
    double s = 0;
    std::vector<double> t, lengths;
    std::optional<std::vector<Rational>> exact_t, exact_lengths;  // present when the lengths are rational
    double residual = 0;

    std::size_t size() const noexcept { return lengths.size(); }
    bool is_exact() const noexcept { return exact_t.has_value(); }
};

inline Partition build_partition_only(const IfsPath& path) {
    Partition p;
    const DimensionResult dim = similarity_dimension(path);
    p.s = dim.s;
    const std::size_t n = path.size();
    const auto& maps = path.maps();
    std::vector<Rational> exact;
    const bool equal_exact = std::all_of(maps.begin(), maps.end(), [&](const Similarity& m) {
        return m.ratio().is_exact() && maps.front().ratio().is_exact() && m.ratio().rational() == maps.front().ratio().rational();
    });
    const bool equal_approx = std::all_of(maps.begin(), maps.end(), [&](const Similarity& m) { return m.ratio() == maps.front().ratio(); });
    if (equal_exact || equal_approx) {
        // Equal ratios give r^s = 1/N exactly.
        exact.assign(n, Rational(1, static_cast<long long>(n)));
    } else if (path.is_exact() && std::abs(dim.s - std::round(dim.s)) < 1e-12 && std::round(dim.s) >= 1) {
        // Integer dimension with rational ratios: r_i^s is rational; accept it if the lengths sum to 1 exactly.
        Rational sum = 0;
        for (const auto& m : maps) {
            exact.push_back(rational_pow(m.ratio().rational(), static_cast<unsigned>(std::round(dim.s))));
            sum += exact.back();
        }
        if (sum != 1) exact.clear();
    }
    if (!exact.empty()) {
        std::vector<Rational> t{Rational(0)};
        for (const auto& l : exact) t.push_back(t.back() + l);
        for (const auto& l : exact) p.lengths.push_back(rational_to_double(l));
        for (const auto& v : t) p.t.push_back(rational_to_double(v));
        p.exact_t = std::move(t);
        p.exact_lengths = std::move(exact);
        p.residual = 0;
        return p;
    }
    p.t.push_back(0);
    double sum = 0;
    for (const auto& m : maps) {
        p.lengths.push_back(std::pow(m.ratio().to_double(), p.s));
        sum += p.lengths.back();
    }
    p.residual = std::abs(sum - 1.0);
    // Cumulative sums, with the last breakpoint pinned to 1 so [0, 1] is covered.
    for (std::size_t i = 0; i + 1 < n; ++i) p.t.push_back(p.t.back() + p.lengths[i]);
    p.t.push_back(1.0);
    return p;
}

/// The one-dimensional companion system s_i(t) = t·t_i + (1 − t)·t_{i−1}.
inline IfsPath companion_ifs(const Partition& p) {
    std::vector<Similarity> maps;
    for (std::size_t i = 0; i < p.size(); ++i) {
        Scalar len = p.is_exact() ? Scalar((*p.exact_lengths)[i]) : Scalar::approx(p.t[i + 1] - p.t[i]);
        Scalar off = p.is_exact() ? Scalar((*p.exact_t)[i]) : Scalar::approx(p.t[i]);
        maps.emplace_back(len, identity_orthogonal(1), Point{off});
    }
    return IfsPath(std::move(maps), true);
}

struct HutchinsonData {
    Partition partition;
    IfsPath companion;
};

inline HutchinsonData build_partition(const IfsPath& path) {
    Partition p = build_partition_only(path);
    IfsPath c = companion_ifs(p);
    return {std::move(p), std::move(c)};
}

namespace detail {
// Letter for t in the partition, ties going to the left interval; t = 0 takes letter 1.
template <class T>
std::size_t letter_of(const std::vector<T>& t, const T& x) {
    const std::size_t n = t.size() - 1;
    if (x <= t[0]) return 0;
    auto it = std::lower_bound(t.begin() + 1, t.end(), x);  // first breakpoint ≥ x
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    return std::min(i, n) - 1;
}
}  // namespace detail

/// Generation-k word σ with t ∈ s_σ([0,1]).
inline Word address_of(double t, int k, const Partition& p) {
    if (!(t >= 0 && t <= 1)) throw InvalidInput("parameter must lie in [0, 1]");
    Word w;
    for (int g = 0; g < k; ++g) {
        const std::size_t i = detail::letter_of(p.t, t);
        w.letters.push_back(static_cast<int>(i) + 1);
        t = std::clamp((t - p.t[i]) / p.lengths[i], 0.0, 1.0);
    }
    return w;
}

inline Word address_of(const Rational& t, int k, const Partition& p) {
    if (!p.is_exact()) return address_of(rational_to_double(t), k, p);
    if (t < 0 || t > 1) throw InvalidInput("parameter must lie in [0, 1]");
    Rational x = t;
    Word w;
    for (int g = 0; g < k; ++g) {
        const std::size_t i = detail::letter_of(*p.exact_t, x);
        w.letters.push_back(static_cast<int>(i) + 1);
        x = (x - (*p.exact_t)[i]) / (*p.exact_lengths)[i];
    }
    return w;
}

/// φ(t) with an error certificate.
struct ParamPoint {
    double t = 0;
    Word address;
    std::vector<double> value;
    double error = 0;
    bool at_vertex = false;  // the address ended on a copy endpoint, so value is S_σ(0) or S_σ(e1)
};

/// Evaluator for the Hutchinson parameterization φ of a normalized path.
class Parameterization {
public:
    explicit Parameterization(const IfsPath& path, std::size_t max_depth = 2000)
        : maps_(path.numeric()), part_(build_partition_only(path)), n_(path.dim()), max_depth_(max_depth) {
        const ApproxCurve c1 = iterate(path, 1);
        diam_bound_ = diameter(c1.polyline) + 2.0 * c1.error_bound;
        rmax_ = path.max_ratio();
        for (const auto& m : maps_) ratios_.push_back(m.ratio);
    }

    const Partition& partition() const noexcept { return part_; }
    double diam_bound() const noexcept { return diam_bound_; }
    int dim() const noexcept { return n_; }
    const std::vector<AffineMap>& maps() const noexcept { return maps_; }

    ParamPoint eval(double t, double tol) const { return descend(t, tol, part_.t, part_.lengths); }

    /// Exact parameter: exact partitions are descended in rational arithmetic, which matters when
    /// s is large (a rounding error δ in t moves φ(t) by about δ^{1/s}).
    ParamPoint eval(const Rational& t, double tol) const {
        if (!part_.is_exact()) return eval(rational_to_double(t), tol);
        if (small_) {
            if (auto out = descend_small(t, tol)) return std::move(*out);
        }
        return descend(t, tol, *part_.exact_t, *part_.exact_lengths);
    }

private:
    std::size_t depth_cap(double tol) const {
        if (!(tol > 0)) throw InvalidInput("tolerance must be positive");
        const double levels = std::ceil(std::log(tol / diam_bound_) / std::log(rmax_));
        if (levels > static_cast<double>(max_depth_))
            throw BudgetError("tolerance " + format_real(tol, 3) + " needs more than " + std::to_string(max_depth_) + " address levels");
        return static_cast<std::size_t>(std::max(0.0, levels));
    }

    // Exact breakpoints c_i/D with a small common denominator, so that a parameter a/b can be
    // descended in 128-bit integers while b < 2^100.
    struct SmallPartition {
        std::uint64_t d = 1;
        std::vector<std::uint64_t> c, l;
    };
    using u128 = unsigned __int128;
    static constexpr u128 small_limit = u128(1) << 100;  // keeps a·D, c_i·b and b·l_i below 2^120

    static std::optional<SmallPartition> small_partition(const Partition& p) {
        if (!p.is_exact()) return std::nullopt;
        BigInt d = 1;
        for (const auto& t : *p.exact_t) d = boost::multiprecision::lcm(d, BigInt(boost::multiprecision::denominator(t)));
        if (d > (1 << 20)) return std::nullopt;
        SmallPartition sp;
        sp.d = d.convert_to<std::uint64_t>();
        for (const auto& t : *p.exact_t) sp.c.push_back(BigInt(boost::multiprecision::numerator(t) * d / boost::multiprecision::denominator(t)).convert_to<std::uint64_t>());
        for (std::size_t i = 0; i + 1 < sp.c.size(); ++i) sp.l.push_back(sp.c[i + 1] - sp.c[i]);
        return sp;
    }

    static int ctz128(u128 x) {
        const auto lo = static_cast<std::uint64_t>(x);
        return lo != 0 ? std::countr_zero(lo) : 64 + std::countr_zero(static_cast<std::uint64_t>(x >> 64));
    }

    static u128 gcd128(u128 a, u128 b) {
        if (a == 0) return b;
        if (b == 0) return a;
        const int shift = std::min(ctz128(a), ctz128(b));
        a >>= ctz128(a);
        do {
            b >>= ctz128(b);
            if (a > b) std::swap(a, b);
            b -= a;
        } while (b != 0);
        return a << shift;
    }

    static u128 to_u128(const BigInt& v) {
        return (static_cast<u128>(BigInt(v >> 64).convert_to<std::uint64_t>()) << 64) |
               static_cast<u128>(BigInt(v & BigInt(~std::uint64_t(0))).convert_to<std::uint64_t>());
    }

    std::optional<ParamPoint> descend_small(const Rational& t, double tol) const {
        if (t < 0 || t > 1) throw InvalidInput("parameter must lie in [0, 1]");
        const BigInt& tn = boost::multiprecision::numerator(t);
        const BigInt& td = boost::multiprecision::denominator(t);
        if (td >= small_limit) return std::nullopt;
        u128 a = to_u128(tn), b = to_u128(td);
        const SmallPartition& sp = *small_;
        const std::size_t n = sp.l.size(), cap = depth_cap(tol);
        ParamPoint out;
        out.t = rational_to_double(t);
        double r = 1;
        std::vector<double> anchor(static_cast<std::size_t>(n_), 0.0);
        anchor[0] = 0.5;
        auto at_end = [&] { return a == 0 || a == b; };
        while (r * diam_bound_ > tol) {
            if (out.address.size() >= cap + 64) throw BudgetError("address refinement did not reach the tolerance");
            if (at_end()) break;
            // Same rule as letter_of: the interval (t_i, t_{i+1}] containing x, ties to the left.
            const u128 ad = a * sp.d;
            std::size_t i = 1;
            while (i < n && sp.c[i] * b < ad) ++i;
            --i;
            out.address.letters.push_back(static_cast<int>(i) + 1);
            r *= ratios_[i];
            a = ad - sp.c[i] * b;
            b *= sp.l[i];
            const u128 g = gcd128(a, b);
            a /= g, b /= g;
            if (b >= small_limit) return std::nullopt;
        }
        if (at_end()) {
            anchor[0] = a == 0 ? 0.0 : 1.0;
            out.at_vertex = true;
        }
        finish(out, anchor, r);
        return out;
    }

    void finish(ParamPoint& out, std::vector<double> x, double r) const {
        std::vector<double> y(x.size());
        for (auto it = out.address.letters.rbegin(); it != out.address.letters.rend(); ++it) {
            maps_[static_cast<std::size_t>(*it - 1)].apply(x, y);
            std::swap(x, y);
        }
        out.value = std::move(x);
        out.error = out.at_vertex ? 0.0 : r * diam_bound_;
    }

    template <class T>
    ParamPoint descend(T t, double tol, const std::vector<T>& bp, const std::vector<T>& len) const {
        if (t < T(0) || t > T(1)) throw InvalidInput("parameter must lie in [0, 1]");
        const std::size_t cap = depth_cap(tol);
        ParamPoint out;
        if constexpr (std::is_same_v<T, double>) out.t = t;
        else out.t = rational_to_double(t);
        double r = 1;
        std::vector<double> anchor(static_cast<std::size_t>(n_), 0.0);
        anchor[0] = 0.5;
        while (r * diam_bound_ > tol) {
            if (out.address.size() >= cap + 64) throw BudgetError("address refinement did not reach the tolerance");
            if (t == T(0) || t == T(1)) {
                anchor[0] = t == T(0) ? 0.0 : 1.0;
                out.at_vertex = true;
                break;
            }
            const std::size_t i = detail::letter_of(bp, t);
            out.address.letters.push_back(static_cast<int>(i) + 1);
            r *= ratios_[i];
            t = (t - bp[i]) / len[i];
            if constexpr (std::is_same_v<T, double>) t = std::clamp(t, 0.0, 1.0);
        }
        if (!out.at_vertex && (t == T(0) || t == T(1))) {
            anchor[0] = t == T(0) ? 0.0 : 1.0;
            out.at_vertex = true;
        }
        finish(out, anchor, r);
        return out;
    }

    std::vector<AffineMap> maps_;
    Partition part_;
    int n_;
    std::size_t max_depth_;
    double diam_bound_ = 0, rmax_ = 0;
    std::vector<double> ratios_;
    std::optional<SmallPartition> small_ = small_partition(part_);
};

inline ParamPoint eval_phi(const IfsPath& path, double t, double tol) { return Parameterization(path).eval(t, tol); }

/// s_σ(t) for the companion system.
inline double companion_image(const Partition& p, const Word& w, double t) {
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        const std::size_t i = static_cast<std::size_t>(*it - 1);
        t = p.t[i] + p.lengths[i] * t;
    }
    return t;
}

inline Rational companion_image(const Partition& p, const Word& w, Rational t) {
    if (!p.is_exact()) throw InvalidInput("exact companion image needs an exact partition");
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        const std::size_t i = static_cast<std::size_t>(*it - 1);
        t = (*p.exact_t)[i] + (*p.exact_lengths)[i] * t;
    }
    return t;
}

/// max over sampled t of |S_σ(φ(t)) − φ(s_σ(t))|, with every φ evaluated to `tol`.
inline double check_structural_identity(const Parameterization& phi, const IfsPath& path, const Word& w, int samples, double tol,
                                        std::uint64_t seed = 1) {
    check_word(path, w);
    const AffineMap sw = word_affine(path, phi.maps(), w);
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int k = 0; k < samples; ++k) {
        // Dyadic samples are exact both as doubles and as rationals.
        const std::uint64_t num = rng() >> 11;
        const Rational t(static_cast<long long>(num), static_cast<long long>(1ULL << 53));
        ParamPoint lhs, rhs;
        if (phi.partition().is_exact()) {
            lhs = phi.eval(t, tol);
            rhs = phi.eval(companion_image(phi.partition(), w, t), tol);
        } else {
            const double td = rational_to_double(t);
            lhs = phi.eval(td, tol);
            rhs = phi.eval(companion_image(phi.partition(), w, td), tol);
        }
        worst = std::max(worst, dist(sw(lhs.value), rhs.value));
    }
    return worst;
}

inline double check_structural_identity(const IfsPath& path, const Word& w, int samples, double tol = 1e-10, std::uint64_t seed = 1) {
    return check_structural_identity(Parameterization(path), path, w, samples, tol, seed);
}

struct HolderProfile {
    int generation = 0;
    double sup_ratio = 0, inf_ratio = 0;
    std::size_t pairs = 0;
};

/// Extremes of d(φ(u), φ(v)) / |u − v|^{1/s} over pairs of generation-g companion breakpoints.
inline HolderProfile holder_profile(const IfsPath& path, int g, std::size_t budget = default_point_budget) {
    const ApproxCurve c = iterate(path, g, budget);
    const Partition p = build_partition_only(path);
    const Polyline u = iterate(companion_ifs(p), g, budget).polyline;  // φ maps vertex j of T^g(I) to breakpoint j
    const std::size_t m = c.polyline.size();
    const double inv_s = 1.0 / p.s;
    HolderProfile out{g, 0, std::numeric_limits<double>::infinity(), 0};
    // With equal lengths the gaps are multiples of N^-g, so the powers can be tabulated.
    const bool uniform = p.is_exact() && std::all_of(p.lengths.begin(), p.lengths.end(), [&](double l) { return l == p.lengths.front(); });
    std::vector<double> pow_table;
    if (uniform) {
        pow_table.resize(m);
        const double step = 1.0 / static_cast<double>(m - 1);
        for (std::size_t d = 1; d < m; ++d) pow_table[d] = std::pow(static_cast<double>(d) * step, inv_s);
    }
    const int n = c.polyline.dim;
    const double* xs = c.polyline.coords.data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* pi = xs + i * static_cast<std::size_t>(n);
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* pj = xs + j * static_cast<std::size_t>(n);
            double d2 = 0;
            for (int k = 0; k < n; ++k) d2 += (pi[k] - pj[k]) * (pi[k] - pj[k]);
            const double denom = uniform ? pow_table[j - i] : std::pow(u.point(j)[0] - u.point(i)[0], inv_s);
            const double ratio = std::sqrt(d2) / denom;
            out.sup_ratio = std::max(out.sup_ratio, ratio);
            out.inf_ratio = std::min(out.inf_ratio, ratio);
        }
    }
    out.pairs = m * (m - 1) / 2;
    return out;
}

/// Outcome of the arclength identity check on [u, v].
struct ArclengthResult {
    double lhs = 0, rhs = 0;                      // Σ r_σ^s and the covered length
    std::optional<Rational> lhs_exact, rhs_exact;  // exact values for exact partitions
    std::size_t intervals = 0;
};

namespace detail {
template <class T>
void decompose(const std::vector<T>& bp, const std::vector<T>& len, const T& u, const T& v, const T& a, const T& width,
               const T& weight, int depth, int k, T& lhs, T& rhs, std::size_t& count) {
    const T b = T(a + width);
    if (b <= u || a >= v) return;
    if (a >= u && b <= v) {
        lhs += weight;
        rhs += T(b - a);
        ++count;
        return;
    }
    if (depth == k) return;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        decompose<T>(bp, len, u, v, T(a + width * bp[i]), T(width * len[i]), T(weight * len[i]), depth + 1, k, lhs, rhs, count);
}
}  // namespace detail

/// Decomposes [u, v] into maximal companion intervals s_σ([0,1]) of generation ≤ k. The left side
/// accumulates r_σ^s as products of partition lengths, the right side the interval lengths themselves.
inline ArclengthResult arclength_identity(const Partition& p, const Rational& u, const Rational& v, int k) {
    if (!(u >= 0 && u < v && v <= 1)) throw InvalidInput("need 0 <= u < v <= 1");
    ArclengthResult out;
    if (p.is_exact()) {
        Rational lhs = 0, rhs = 0;
        detail::decompose<Rational>(*p.exact_t, *p.exact_lengths, u, v, Rational(0), Rational(1), Rational(1), 0, k, lhs, rhs, out.intervals);
        out.lhs = rational_to_double(lhs);
        out.rhs = rational_to_double(rhs);
        out.lhs_exact = lhs;
        out.rhs_exact = rhs;
        return out;
    }
    const double ud = rational_to_double(u), vd = rational_to_double(v);
    detail::decompose<double>(p.t, p.lengths, ud, vd, 0.0, 1.0, 1.0, 0, k, out.lhs, out.rhs, out.intervals);
    return out;
}

inline ArclengthResult arclength_identity(const Partition& p, double u, double v, int k) {
    if (!(u >= 0 && u < v && v <= 1)) throw InvalidInput("need 0 <= u < v <= 1");
    ArclengthResult out;
    detail::decompose<double>(p.t, p.lengths, u, v, 0.0, 1.0, 1.0, 0, k, out.lhs, out.rhs, out.intervals);
    return out;
}

}  // namespace ifsarc
