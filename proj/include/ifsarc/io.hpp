#pragma once

#include <cmath>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "ifs_path.hpp"

namespace ifsarc {

/// IFS documents: {"dimension": n, "maps": [...]} where each map has
///   ratio        {"num", "den"} or a decimal
///   rotation     {"turns": {"num", "den"}} | {"radians": v[, "token", "sign", "irrational"]} |
///                {"acos": {"num", "den"}, "sign": ±1, "irrational": bool}     (planar maps only)
///   matrix       row-major orthogonal matrix, exact-or-decimal entries        (n ≠ 2)
///   reflect      bool                                                          (planar maps only)
///   translation  list of exact-or-decimal coordinates
/// Integers and {"num", "den"} are exact, other numbers are decimals. Numerators and denominators may be
/// strings of digits when they exceed 64 bits. Opaque angles keep their token, so equal tokens stay equal.
namespace detail {

using Json = nlohmann::ordered_json;

inline std::string at_field(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

inline BigInt big_integer(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (std::regex_match(s, std::regex("-?[0-9]+"))) return BigInt(s);
    }
    throw SchemaError(where, "expected an integer");
}

inline Rational fraction(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw SchemaError(where, "expected {\"num\", \"den\"}");
    const BigInt den = big_integer(j["den"], at_field(where, "den"));
    if (den == 0) throw SchemaError(at_field(where, "den"), "zero denominator");
    return make_rational(big_integer(j["num"], at_field(where, "num")), den);
}

inline Scalar scalar(const Json& j, const std::string& where) {
    if (j.is_number_integer() || j.is_number_unsigned()) return Scalar(Rational(big_integer(j, where)));
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw SchemaError(where, "non-finite number");
        return Scalar::approx(v);
    }
    if (j.is_object()) return Scalar(fraction(j, where));
    throw SchemaError(where, "expected a number or {\"num\", \"den\"}");
}

inline Json big_json(const BigInt& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) return v.convert_to<std::int64_t>();
    return v.str();
}

inline Json fraction_json(const Rational& q) {
    Json j;
    j["num"] = big_json(boost::multiprecision::numerator(q));
    j["den"] = big_json(boost::multiprecision::denominator(q));
    return j;
}

/// Exact integers print as integers so that a round trip keeps them exact.
inline Json scalar_json(const Scalar& s, bool as_fraction = false) {
    if (!s.is_exact()) return s.to_double();
    if (!as_fraction && boost::multiprecision::denominator(s.rational()) == 1) return big_json(boost::multiprecision::numerator(s.rational()));
    return fraction_json(s.rational());
}

inline std::int64_t sign_of(const Json& j, const std::string& where) {
    if (!j.contains("sign")) return 1;
    const Json& s = j["sign"];
    if (!s.is_number_integer() || (s.get<std::int64_t>() != 1 && s.get<std::int64_t>() != -1)) throw SchemaError(at_field(where, "sign"), "sign must be 1 or -1");
    return s.get<std::int64_t>();
}

inline bool flag_of(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return false;
    if (!j[key].is_boolean()) throw SchemaError(at_field(where, key), "expected a boolean");
    return j[key].get<bool>();
}

inline Rotation2 rotation(const Json& j, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where, "expected an object");
    const int forms = static_cast<int>(j.contains("turns")) + static_cast<int>(j.contains("radians")) + static_cast<int>(j.contains("acos"));
    if (forms != 1) throw SchemaError(where, "exactly one of turns, radians, acos is required");
    if (j.contains("turns")) return Rotation2::turns(fraction(j["turns"], at_field(where, "turns")));
    const std::int64_t sign = sign_of(j, where);
    const bool irrational = flag_of(j, "irrational", where);
    if (j.contains("acos")) {
        const Rational c = fraction(j["acos"], at_field(where, "acos"));
        if (c < -1 || c > 1) throw SchemaError(at_field(where, "acos"), "cosine outside [-1, 1]");
        const std::string token = "acos(" + rational_to_string(c) + ")";
        return Rotation2::opaque(token, std::acos(rational_to_double(c)), irrational).times(sign);
    }
    const Json& r = j["radians"];
    if (!r.is_number()) throw SchemaError(at_field(where, "radians"), "expected a number");
    const double v = r.get<double>();
    if (!std::isfinite(v)) throw SchemaError(at_field(where, "radians"), "non-finite number");
    std::string token;
    if (j.contains("token")) {
        if (!j["token"].is_string()) throw SchemaError(at_field(where, "token"), "expected a string");
        token = j["token"].get<std::string>();
    } else {
        token = "rad(" + format_real(v, 17) + ")";
    }
    return Rotation2::opaque(token, v, irrational).times(sign);
}

inline Json rotation_json(const Rotation2& r) {
    Json j;
    if (r.is_exact()) {
        j["turns"] = fraction_json(r.exact_turns());
        return j;
    }
    const auto& terms = r.terms();
    if (terms.size() != 1 || r.exact_turns() != 0 || std::abs(terms.begin()->second.coeff) != 1)
        throw InvalidInput("rotation " + r.to_string() + " has no document form");
    const auto& [token, term] = *terms.begin();
    static const std::regex acos_token(R"(acos\((-?[0-9]+)(?:/([0-9]+))?\))");
    std::smatch m;
    if (std::regex_match(token, m, acos_token)) {
        Json c;
        c["num"] = big_json(BigInt(m[1].str()));
        c["den"] = m[2].matched ? big_json(BigInt(m[2].str())) : Json(1);
        j["acos"] = c;
    } else {
        j["radians"] = term.radians;
        j["token"] = token;
    }
    j["sign"] = term.coeff;
    j["irrational"] = term.irrational;
    return j;
}

inline Similarity similarity(const Json& j, int dim, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where, "expected an object");
    for (const char* key : {"ratio", "translation"})
        if (!j.contains(key)) throw SchemaError(at_field(where, key), "missing");
    const Scalar ratio = scalar(j["ratio"], at_field(where, "ratio"));
    const double r = ratio.to_double();
    if (!(r > 0 && r < 1)) throw SchemaError(at_field(where, "ratio"), "ratio " + ratio.to_string() + " is not in (0, 1)");
    const Json& t = j["translation"];
    if (!t.is_array() || t.size() != static_cast<std::size_t>(dim))
        throw SchemaError(at_field(where, "translation"), "expected " + std::to_string(dim) + " coordinates");
    Point b;
    for (std::size_t k = 0; k < t.size(); ++k) b.push_back(scalar(t[k], at_field(where, "translation[" + std::to_string(k) + "]")));
    OrthogonalPart orth;
    if (dim == 2) {
        if (j.contains("matrix")) throw SchemaError(at_field(where, "matrix"), "planar maps use rotation and reflect");
        const Rotation2 rot = j.contains("rotation") ? rotation(j["rotation"], at_field(where, "rotation")) : Rotation2{};
        orth = PlanarOrthogonal{rot, flag_of(j, "reflect", where)};
    } else {
        if (j.contains("rotation") || j.contains("reflect")) throw SchemaError(at_field(where, "rotation"), "only planar maps take a rotation");
        if (!j.contains("matrix")) throw SchemaError(at_field(where, "matrix"), "missing");
        const Json& m = j["matrix"];
        if (!m.is_array() || m.size() != static_cast<std::size_t>(dim * dim))
            throw SchemaError(at_field(where, "matrix"), "expected " + std::to_string(dim * dim) + " entries");
        std::vector<Scalar> e;
        for (std::size_t k = 0; k < m.size(); ++k) e.push_back(scalar(m[k], at_field(where, "matrix[" + std::to_string(k) + "]")));
        try {
            orth = make_matrix_orthogonal(dim, std::move(e));
        } catch (const Error& err) {
            throw SchemaError(at_field(where, "matrix"), err.what());
        }
    }
    return Similarity(ratio, std::move(orth), std::move(b));
}

}  // namespace detail

/// Parses an IFS document. Exact values stay exact; the path is not validated.
inline IfsPath load_ifs(std::string_view document) {
    detail::Json j;
    try {
        j = detail::Json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        // Byte offset to line and column.
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < document.size(); ++k) {
            if (document[k] == '\n') ++line, col = 1;
            else ++col;
        }
        throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed document");
    }
    if (!j.is_object()) throw SchemaError("", "top level must be an object");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer() || j["dimension"].get<int>() < 1)
        throw SchemaError("dimension", "expected a positive integer");
    const int dim = j["dimension"].get<int>();
    if (!j.contains("maps") || !j["maps"].is_array()) throw SchemaError("maps", "expected a list");
    if (j["maps"].size() < 2) throw SchemaError("maps", "an IFS path needs at least two maps");
    std::vector<Similarity> maps;
    for (std::size_t k = 0; k < j["maps"].size(); ++k) maps.push_back(detail::similarity(j["maps"][k], dim, "maps[" + std::to_string(k) + "]"));
    IfsPath path(std::move(maps));
    return IfsPath(path.maps(), is_normalized(path));
}

inline std::string serialize_ifs(const IfsPath& path) {
    detail::Json j;
    j["dimension"] = path.dim();
    j["maps"] = detail::Json::array();
    for (const auto& s : path.maps()) {
        detail::Json m;
        m["ratio"] = detail::scalar_json(s.ratio(), true);
        if (const auto* p = std::get_if<PlanarOrthogonal>(&s.orthogonal())) {
            m["rotation"] = detail::rotation_json(p->rotation);
            m["reflect"] = p->reflect;
        } else {
            detail::Json e = detail::Json::array();
            for (const auto& x : std::get<MatrixOrthogonal>(s.orthogonal()).entries) e.push_back(detail::scalar_json(x));
            m["matrix"] = e;
        }
        detail::Json t = detail::Json::array();
        for (const auto& x : s.translation()) t.push_back(detail::scalar_json(x));
        m["translation"] = t;
        j["maps"].push_back(m);
    }
    return j.dump(2) + "\n";
}

}  // namespace ifsarc
