#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "orthogonal.hpp"
#include "scalar.hpp"

namespace ifsarc {

using Point = std::vector<Scalar>;

inline Point origin(int n) { return Point(static_cast<std::size_t>(n), Scalar(0)); }

inline Point unit_e1(int n) {
    Point p = origin(n);
    p[0] = 1;
    return p;
}

inline std::vector<double> to_double(const Point& p) {
    std::vector<double> out(p.size());
    std::transform(p.begin(), p.end(), out.begin(), [](const Scalar& s) { return s.to_double(); });
    return out;
}

inline bool is_exact(const Point& p) {
    return std::all_of(p.begin(), p.end(), [](const Scalar& s) { return s.is_exact(); });
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double distance(const Point& a, const Point& b) { return distance(to_double(a), to_double(b)); }

/// A finite address σ = (σ_1, …, σ_m) over the letters 1..N.
struct Word {
    std::vector<int> letters;

    std::size_t size() const noexcept { return letters.size(); }
    bool empty() const noexcept { return letters.empty(); }
    friend bool operator==(const Word&, const Word&) = default;

    Word then(int letter, std::size_t times = 1) const {
        Word w = *this;
        w.letters.insert(w.letters.end(), times, letter);
        return w;
    }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < letters.size(); ++i) s += (i ? "," : "") + std::to_string(letters[i]);
        return s + ")";
    }
};

/// Floating-point affine similarity x ↦ M x + b with M = ratio·A. Used on hot paths.
struct AffineMap {
    int n = 0;
    double ratio = 1.0;
    std::vector<double> m;  // row-major n×n, already scaled by ratio
    std::vector<double> b;

    static AffineMap identity(int n) {
        AffineMap a{n, 1.0, std::vector<double>(static_cast<std::size_t>(n * n), 0.0), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
        for (int i = 0; i < n; ++i) a.m[static_cast<std::size_t>(i * n + i)] = 1.0;
        return a;
    }

    void apply(std::span<const double> x, std::span<double> out) const {
        for (int i = 0; i < n; ++i) {
            double s = b[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) s += m[static_cast<std::size_t>(i * n + j)] * x[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = s;
        }
    }

    std::vector<double> operator()(std::span<const double> x) const {
        std::vector<double> out(static_cast<std::size_t>(n));
        apply(x, out);
        return out;
    }

    /// this ∘ other
    AffineMap then_inner(const AffineMap& other) const {
        AffineMap c{n, ratio * other.ratio, std::vector<double>(m.size(), 0.0), b};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int k = 0; k < n; ++k) s += m[static_cast<std::size_t>(i * n + k)] * other.m[static_cast<std::size_t>(k * n + j)];
                c.m[static_cast<std::size_t>(i * n + j)] = s;
            }
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) c.b[static_cast<std::size_t>(i)] += m[static_cast<std::size_t>(i * n + k)] * other.b[static_cast<std::size_t>(k)];
        return c;
    }

    AffineMap inverse() const {
        // M = ratio·A with A orthogonal, so M⁻¹ = Mᵀ / ratio².
        AffineMap inv{n, 1.0 / ratio, std::vector<double>(m.size()), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
        const double k = 1.0 / (ratio * ratio);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) inv.m[static_cast<std::size_t>(i * n + j)] = m[static_cast<std::size_t>(j * n + i)] * k;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) inv.b[static_cast<std::size_t>(i)] -= inv.m[static_cast<std::size_t>(i * n + j)] * b[static_cast<std::size_t>(j)];
        return inv;
    }
};

class Similarity;
namespace detail {
Similarity make_similarity_unchecked(Scalar ratio, OrthogonalPart orth, Point translation);
}

/// A contracting similarity S(x) = r·A(x) + b with 0 < r < 1.
class Similarity {
public:
    Similarity(Scalar ratio, OrthogonalPart orthogonal, Point translation)
        : ratio_(std::move(ratio)), orth_(std::move(orthogonal)), b_(std::move(translation)) {
        const double r = ratio_.to_double();
        if (ratio_.is_exact() ? (ratio_.rational() <= 0 || ratio_.rational() >= 1) : !(r > 0.0 && r < 1.0))
            throw InvalidInput("similarity ratio must lie strictly between 0 and 1, got " + ratio_.to_string());
        check_dims();
    }

    int dim() const noexcept { return static_cast<int>(b_.size()); }
    const Scalar& ratio() const noexcept { return ratio_; }
    const OrthogonalPart& orthogonal() const noexcept { return orth_; }
    const Point& translation() const noexcept { return b_; }

    bool is_exact() const { return ratio_.is_exact() && ifsarc::is_exact(b_) && ifsarc::is_exact(orth_); }

    /// Linear part r·A, exact when every factor is.
    std::vector<Scalar> linear() const {
        std::vector<Scalar> a = matrix_of(orth_);
        for (auto& e : a) e = ratio_ * e;
        return a;
    }

    AffineMap numeric() const {
        AffineMap a{dim(), ratio_.to_double(), matrix_double(orth_), ifsarc::to_double(b_)};
        for (auto& e : a.m) e *= a.ratio;
        return a;
    }

    std::string to_string() const {
        std::string s = "ratio=" + ratio_.to_string();
        if (const auto* p = std::get_if<PlanarOrthogonal>(&orth_))
            s += " rot=" + p->rotation.to_string() + (p->reflect ? " reflect" : "");
        s += " b=(";
        for (std::size_t i = 0; i < b_.size(); ++i) s += (i ? "," : "") + b_[i].to_string();
        return s + ")";
    }

private:
    friend Similarity detail::make_similarity_unchecked(Scalar, OrthogonalPart, Point);
    struct Unchecked {};
    Similarity(Unchecked, Scalar ratio, OrthogonalPart orth, Point translation)
        : ratio_(std::move(ratio)), orth_(std::move(orth)), b_(std::move(translation)) {
        check_dims();
    }
    void check_dims() const {
        if (b_.empty()) throw DimensionError("similarity needs dimension >= 1");
        if (ifsarc::dimension(orth_) != dim()) throw DimensionError("orthogonal part and translation disagree in dimension");
    }

    Scalar ratio_;
    OrthogonalPart orth_;
    Point b_;
};

namespace detail {
/// General (possibly expanding) similarity; only used for conjugation during normalization.
inline Similarity make_similarity_unchecked(Scalar ratio, OrthogonalPart orth, Point translation) {
    return Similarity(Similarity::Unchecked{}, std::move(ratio), std::move(orth), std::move(translation));
}

inline Point mat_vec(const std::vector<Scalar>& m, const Point& x) {
    const std::size_t n = x.size();
    Point out(n, Scalar(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += m[i * n + j] * x[j];
    return out;
}
}  // namespace detail

inline Point image(const Similarity& s, const Point& p) {
    if (static_cast<int>(p.size()) != s.dim()) throw DimensionError("point and similarity dimensions differ");
    Point out = detail::mat_vec(s.linear(), p);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s.translation()[i];
    return out;
}

/// S ∘ T
inline Similarity compose(const Similarity& s, const Similarity& t) {
    if (s.dim() != t.dim()) throw DimensionError("cannot compose similarities of different dimension");
    Point b = image(s, t.translation());
    return detail::make_similarity_unchecked(s.ratio() * t.ratio(), compose(s.orthogonal(), t.orthogonal()), std::move(b));
}

inline Similarity inverse(const Similarity& s) {
    const Scalar inv_r = Scalar(1) / s.ratio();
    OrthogonalPart ai = inverse(s.orthogonal());
    auto m = matrix_of(ai);
    for (auto& e : m) e = inv_r * e;
    Point b = detail::mat_vec(m, s.translation());
    for (auto& e : b) e = -e;
    return detail::make_similarity_unchecked(inv_r, std::move(ai), std::move(b));
}

/// Unique fixed point of a contraction: solves (I − rA)x = b.
inline Point fixed_point(const Similarity& s) {
    const int n = s.dim();
    if (std::all_of(s.translation().begin(), s.translation().end(), [](const Scalar& v) { return v.is_exact() && v.rational() == 0; }))
        return origin(n);
    std::vector<Scalar> lin = s.linear();
    std::vector<Scalar> a(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = Scalar(i == j ? 1 : 0) - lin[static_cast<std::size_t>(i * n + j)];
    Point rhs = s.translation();
    const bool exact = std::all_of(a.begin(), a.end(), [](const Scalar& v) { return v.is_exact(); }) && is_exact(rhs);
    if (exact) {
        for (int c = 0; c < n; ++c) {
            int piv = c;
            while (a[static_cast<std::size_t>(piv * n + c)].rational() == 0) ++piv;
            if (piv != c) {
                for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(c * n + k)], a[static_cast<std::size_t>(piv * n + k)]);
                std::swap(rhs[static_cast<std::size_t>(c)], rhs[static_cast<std::size_t>(piv)]);
            }
            for (int r = 0; r < n; ++r) {
                if (r == c) continue;
                Scalar f = a[static_cast<std::size_t>(r * n + c)] / a[static_cast<std::size_t>(c * n + c)];
                if (f.rational() == 0) continue;
                for (int k = c; k < n; ++k) a[static_cast<std::size_t>(r * n + k)] = a[static_cast<std::size_t>(r * n + k)] - f * a[static_cast<std::size_t>(c * n + k)];
                rhs[static_cast<std::size_t>(r)] = rhs[static_cast<std::size_t>(r)] - f * rhs[static_cast<std::size_t>(c)];
            }
        }
        for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(i * n + i)];
        return rhs;
    }
    std::vector<double> w(a.size());
    std::vector<double> y = to_double(rhs);
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = a[i].to_double();
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(w[static_cast<std::size_t>(r * n + c)]) > std::abs(w[static_cast<std::size_t>(piv * n + c)])) piv = r;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(w[static_cast<std::size_t>(c * n + k)], w[static_cast<std::size_t>(piv * n + k)]);
            std::swap(y[static_cast<std::size_t>(c)], y[static_cast<std::size_t>(piv)]);
        }
        for (int r = c + 1; r < n; ++r) {
            double f = w[static_cast<std::size_t>(r * n + c)] / w[static_cast<std::size_t>(c * n + c)];
            for (int k = c; k < n; ++k) w[static_cast<std::size_t>(r * n + k)] -= f * w[static_cast<std::size_t>(c * n + k)];
            y[static_cast<std::size_t>(r)] -= f * y[static_cast<std::size_t>(c)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= w[static_cast<std::size_t>(i * n + k)] * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / w[static_cast<std::size_t>(i * n + i)];
    }
    // One step of iterative refinement keeps the residual at round-off level.
    AffineMap f = s.numeric();
    std::vector<double> fx = f(x);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += (fx[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) / (1.0 - f.ratio);
    Point out;
    for (double v : x) out.push_back(Scalar::approx(v));
    return out;
}

}  // namespace ifsarc
