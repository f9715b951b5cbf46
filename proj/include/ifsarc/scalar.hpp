#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <variant>

#include "errors.hpp"

namespace ifsarc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw InvalidInput("rational with zero denominator");
    return Rational(num, den);
}

inline double rational_to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string rational_to_string(const Rational& q) {
    std::string s = boost::multiprecision::numerator(q).str();
    if (boost::multiprecision::denominator(q) != 1) s += "/" + boost::multiprecision::denominator(q).str();
    return s;
}

/// Reduces q into [0, 1).
inline Rational mod_one(const Rational& q) {
    const BigInt& n = boost::multiprecision::numerator(q);
    const BigInt& d = boost::multiprecision::denominator(q);
    BigInt r = n % d;
    if (r < 0) r += d;
    return Rational(r, d);
}

inline Rational rational_pow(Rational base, unsigned exponent) {
    Rational result = 1;
    while (exponent != 0) {
        if (exponent & 1U) result *= base;
        base *= base;
        exponent >>= 1U;
    }
    return result;
}

/// A real number that stays exact (rational) until it meets an approximate value.
class Scalar {
public:
    Scalar() : value_(Rational(0)) {}
    Scalar(int v) : value_(Rational(v)) {}  // NOLINT(google-explicit-constructor)
    Scalar(const Rational& q) : value_(q) {}  // NOLINT(google-explicit-constructor)

    static Scalar exact(const BigInt& num, const BigInt& den) { return Scalar(make_rational(num, den)); }
    static Scalar approx(double v) {
        Scalar s;
        s.value_ = v;
        return s;
    }

    bool is_exact() const noexcept { return std::holds_alternative<Rational>(value_); }
    const Rational& rational() const { return std::get<Rational>(value_); }

    double to_double() const {
        if (const auto* q = std::get_if<Rational>(&value_)) return rational_to_double(*q);
        return std::get<double>(value_);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(a.rational() + b.rational());
        return approx(a.to_double() + b.to_double());
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(a.rational() - b.rational());
        return approx(a.to_double() - b.to_double());
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(a.rational() * b.rational());
        return approx(a.to_double() * b.to_double());
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) {
            if (b.rational() == 0) throw InvalidInput("division by exact zero");
            return Scalar(a.rational() / b.rational());
        }
        return approx(a.to_double() / b.to_double());
    }
    Scalar operator-() const {
        if (is_exact()) return Scalar(Rational(-rational()));
        return approx(-to_double());
    }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    /// Representation equality: exact values compare exactly, otherwise the doubles are compared.
    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
        if (a.is_exact() != b.is_exact()) return false;
        return a.to_double() == b.to_double();
    }

    std::string to_string() const {
        if (is_exact()) return rational_to_string(rational());
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", to_double());
        return buf;
    }

private:
    std::variant<Rational, double> value_;
};

inline Scalar pow(const Scalar& base, unsigned exponent) {
    if (base.is_exact()) return Scalar(rational_pow(base.rational(), exponent));
    return Scalar::approx(std::pow(base.to_double(), static_cast<double>(exponent)));
}

/// True when a and b agree: exactly for exact pairs, else within tol.
inline bool nearly_equal(const Scalar& a, const Scalar& b, double tol) {
    if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
    return std::abs(a.to_double() - b.to_double()) <= tol;
}

}  // namespace ifsarc
