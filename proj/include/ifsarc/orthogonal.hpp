#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace ifsarc {

/// Three-valued answer for questions that are only sometimes decidable.
enum class Tri { Yes, No, Unknown };

/// A planar rotation angle: an exact rational number of turns plus an integer
/// combination of opaque base angles. Opaque angles are identified by token, so
/// two angles built from the same tokens are equal by construction even when
/// their numeric values cannot be compared exactly.
class Rotation2 {
public:
    struct Term {
        std::int64_t coeff = 0;
        double radians = 0.0;    // value of the base angle (not multiplied by coeff)
        bool irrational = false; // base angle / 2π asserted irrational by the caller
    };

    Rotation2() = default;

    static Rotation2 turns(const Rational& t) {
        Rotation2 r;
        r.turns_ = mod_one(t);
        return r;
    }
    static Rotation2 turns(std::int64_t num, std::int64_t den) { return turns(make_rational(num, den)); }

    static Rotation2 opaque(const std::string& token, double radians, bool irrational = false) {
        Rotation2 r;
        r.terms_[token] = Term{1, radians, irrational};
        return r;
    }

    bool is_exact() const noexcept { return terms_.empty(); }
    const Rational& exact_turns() const noexcept { return turns_; }
    const std::map<std::string, Term>& terms() const noexcept { return terms_; }

    /// Angle in radians, reduced into [0, 2π).
    double radians() const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double a = two_pi * rational_to_double(turns_);
        for (const auto& [_, t] : terms_) a += static_cast<double>(t.coeff) * t.radians;
        a = std::fmod(a, two_pi);
        if (a < 0) a += two_pi;
        return a;
    }

    Rotation2 operator+(const Rotation2& o) const {
        Rotation2 r = *this;
        r.turns_ = mod_one(turns_ + o.turns_);
        for (const auto& [tok, t] : o.terms_) {
            auto [it, inserted] = r.terms_.try_emplace(tok, t);
            if (!inserted) it->second.coeff += t.coeff;
            if (it->second.coeff == 0) r.terms_.erase(it);
        }
        return r;
    }
    Rotation2 operator-() const { return times(-1); }
    Rotation2 operator-(const Rotation2& o) const { return *this + (-o); }

    Rotation2 times(std::int64_t k) const {
        Rotation2 r;
        if (k == 0) return r;
        r.turns_ = mod_one(turns_ * k);
        for (const auto& [tok, t] : terms_) r.terms_[tok] = Term{t.coeff * k, t.radians, t.irrational};
        return r;
    }

    /// Formal (by-construction) equality.
    friend bool operator==(const Rotation2& a, const Rotation2& b) {
        if (a.turns_ != b.turns_ || a.terms_.size() != b.terms_.size()) return false;
        auto it = b.terms_.begin();
        for (const auto& [tok, t] : a.terms_) {
            if (tok != it->first || t.coeff != it->second.coeff) return false;
            ++it;
        }
        return true;
    }

    /// Decides equality as a real angle. Formal equality gives Yes; two exact
    /// angles are decided exactly; otherwise numerically distinct values give No.
    Tri equals(const Rotation2& o, double tol = 1e-12) const {
        if (*this == o) return Tri::Yes;
        if (is_exact() && o.is_exact()) return Tri::No;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double d = std::fmod(std::abs(radians() - o.radians()), two_pi);
        d = std::min(d, two_pi - d);
        return d > tol ? Tri::No : Tri::Unknown;
    }

    /// cos/sin as integers when the angle is an exact multiple of a quarter turn.
    std::optional<std::pair<int, int>> quarter_cos_sin() const {
        if (!is_exact()) return std::nullopt;
        Rational q = turns_ * 4;
        if (boost::multiprecision::denominator(q) != 1) return std::nullopt;
        switch (boost::multiprecision::numerator(q).convert_to<int>()) {
            case 0: return std::pair{1, 0};
            case 1: return std::pair{0, 1};
            case 2: return std::pair{-1, 0};
            default: return std::pair{0, -1};
        }
    }

    std::string to_string() const {
        std::string s = rational_to_string(turns_) + " turn";
        for (const auto& [tok, t] : terms_) s += (t.coeff < 0 ? " - " : " + ") + std::to_string(std::abs(t.coeff)) + "*" + tok;
        return s;
    }

private:
    Rational turns_ = 0;
    std::map<std::string, Term> terms_;
};

/// Planar orthogonal map R_rotation ∘ I, where I reflects through the first axis when `reflect`.
struct PlanarOrthogonal {
    Rotation2 rotation;
    bool reflect = false;
};

/// Orthogonal map of R^n given by its row-major matrix (used for n != 2).
struct MatrixOrthogonal {
    int n = 0;
    std::vector<Scalar> entries;

    const Scalar& at(int i, int j) const { return entries[static_cast<std::size_t>(i * n + j)]; }
};

using OrthogonalPart = std::variant<PlanarOrthogonal, MatrixOrthogonal>;

namespace detail {

inline MatrixOrthogonal matmul(const MatrixOrthogonal& a, const MatrixOrthogonal& b) {
    MatrixOrthogonal c{a.n, std::vector<Scalar>(a.entries.size())};
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            Scalar s = 0;
            for (int k = 0; k < a.n; ++k) s += a.at(i, k) * b.at(k, j);
            c.entries[static_cast<std::size_t>(i * a.n + j)] = s;
        }
    return c;
}

inline MatrixOrthogonal transpose(const MatrixOrthogonal& a) {
    MatrixOrthogonal t{a.n, a.entries};
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) t.entries[static_cast<std::size_t>(i * a.n + j)] = a.at(j, i);
    return t;
}

inline MatrixOrthogonal identity_matrix(int n) {
    MatrixOrthogonal m{n, std::vector<Scalar>(static_cast<std::size_t>(n * n), Scalar(0))};
    for (int i = 0; i < n; ++i) m.entries[static_cast<std::size_t>(i * n + i)] = 1;
    return m;
}

}  // namespace detail

inline OrthogonalPart identity_orthogonal(int n) {
    if (n == 2) return PlanarOrthogonal{};
    return detail::identity_matrix(n);
}

/// Builds a matrix orthogonal part, checking MᵀM = I (exactly for exact entries).
inline MatrixOrthogonal make_matrix_orthogonal(int n, std::vector<Scalar> entries) {
    if (n < 1 || entries.size() != static_cast<std::size_t>(n * n))
        throw DimensionError("orthogonal matrix needs n*n entries");
    MatrixOrthogonal m{n, std::move(entries)};
    MatrixOrthogonal p = detail::matmul(detail::transpose(m), m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!nearly_equal(p.at(i, j), Scalar(i == j ? 1 : 0), 1e-12))
                throw InvalidInput("matrix is not orthogonal");
    return m;
}

inline int dimension(const OrthogonalPart& a) {
    if (std::holds_alternative<PlanarOrthogonal>(a)) return 2;
    return std::get<MatrixOrthogonal>(a).n;
}

inline bool is_exact(const OrthogonalPart& a) {
    if (const auto* p = std::get_if<PlanarOrthogonal>(&a)) return p->rotation.is_exact();
    for (const auto& e : std::get<MatrixOrthogonal>(a).entries)
        if (!e.is_exact()) return false;
    return true;
}

inline bool orientation_preserving(const OrthogonalPart& a) {
    if (const auto* p = std::get_if<PlanarOrthogonal>(&a)) return !p->reflect;
    const auto& m = std::get<MatrixOrthogonal>(a);
    // Determinant by Gaussian elimination in doubles; it is ±1 for orthogonal matrices.
    std::vector<double> w(m.entries.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = m.entries[i].to_double();
    double det = 1.0;
    const int n = m.n;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(w[r * n + c]) > std::abs(w[piv * n + c])) piv = r;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(w[c * n + k], w[piv * n + k]);
            det = -det;
        }
        det *= w[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            double f = w[r * n + c] / w[c * n + c];
            for (int k = c; k < n; ++k) w[r * n + k] -= f * w[c * n + k];
        }
    }
    return det > 0;
}

/// Matrix entries (row-major); exact when the part is exactly representable.
inline std::vector<Scalar> matrix_of(const OrthogonalPart& a) {
    if (const auto* m = std::get_if<MatrixOrthogonal>(&a)) return m->entries;
    const auto& p = std::get<PlanarOrthogonal>(a);
    const Scalar sigma = p.reflect ? -1 : 1;
    Scalar c, s;
    if (auto cs = p.rotation.quarter_cos_sin()) {
        c = cs->first;
        s = cs->second;
    } else {
        const double th = p.rotation.radians();
        c = Scalar::approx(std::cos(th));
        s = Scalar::approx(std::sin(th));
    }
    return {c, -s * sigma, s, c * sigma};
}

inline std::vector<double> matrix_double(const OrthogonalPart& a) {
    if (const auto* p = std::get_if<PlanarOrthogonal>(&a)) {
        const double th = p->rotation.radians();
        double c = std::cos(th), s = std::sin(th);
        if (auto cs = p->rotation.quarter_cos_sin()) {
            c = cs->first;
            s = cs->second;
        }
        const double sg = p->reflect ? -1.0 : 1.0;
        return {c, -s * sg, s, c * sg};
    }
    std::vector<double> out;
    for (const auto& e : std::get<MatrixOrthogonal>(a).entries) out.push_back(e.to_double());
    return out;
}

/// a ∘ b. Planar parts follow the dihedral law (α,f)(β,g) = (α ± β, f xor g).
inline OrthogonalPart compose(const OrthogonalPart& a, const OrthogonalPart& b) {
    if (dimension(a) != dimension(b)) throw DimensionError("orthogonal parts of different dimension");
    if (const auto* pa = std::get_if<PlanarOrthogonal>(&a)) {
        const auto& pb = std::get<PlanarOrthogonal>(b);
        return PlanarOrthogonal{pa->rotation + (pa->reflect ? -pb.rotation : pb.rotation), pa->reflect != pb.reflect};
    }
    return detail::matmul(std::get<MatrixOrthogonal>(a), std::get<MatrixOrthogonal>(b));
}

inline OrthogonalPart inverse(const OrthogonalPart& a) {
    if (const auto* p = std::get_if<PlanarOrthogonal>(&a)) {
        if (p->reflect) return *p;
        return PlanarOrthogonal{-p->rotation, false};
    }
    return detail::transpose(std::get<MatrixOrthogonal>(a));
}

inline OrthogonalPart power(const OrthogonalPart& a, std::int64_t q) {
    if (q < 0) return power(inverse(a), -q);
    if (const auto* p = std::get_if<PlanarOrthogonal>(&a)) {
        if (p->reflect) return q % 2 == 0 ? PlanarOrthogonal{} : *p;
        return PlanarOrthogonal{p->rotation.times(q), false};
    }
    OrthogonalPart result = identity_orthogonal(dimension(a));
    OrthogonalPart base = a;
    while (q != 0) {
        if (q & 1) result = compose(result, base);
        base = compose(base, base);
        q >>= 1;
    }
    return result;
}

/// Equality of orthogonal maps; matrices with approximate entries compare within tol.
inline Tri equals(const OrthogonalPart& a, const OrthogonalPart& b, double tol = 1e-12) {
    if (dimension(a) != dimension(b)) return Tri::No;
    if (const auto* pa = std::get_if<PlanarOrthogonal>(&a)) {
        const auto& pb = std::get<PlanarOrthogonal>(b);
        if (pa->reflect != pb.reflect) return Tri::No;
        return pa->rotation.equals(pb.rotation, tol);
    }
    const auto& ma = std::get<MatrixOrthogonal>(a);
    const auto& mb = std::get<MatrixOrthogonal>(b);
    bool exact = true;
    for (std::size_t i = 0; i < ma.entries.size(); ++i) {
        const Scalar& x = ma.entries[i];
        const Scalar& y = mb.entries[i];
        if (x.is_exact() && y.is_exact()) {
            if (x.rational() != y.rational()) return Tri::No;
        } else {
            exact = false;
            if (std::abs(x.to_double() - y.to_double()) > tol) return Tri::No;
        }
    }
    return exact ? Tri::Yes : Tri::Unknown;
}

}  // namespace ifsarc
