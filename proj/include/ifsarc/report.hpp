#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace ifsarc {

enum class Verdict { Pass, Fail, Undecided, CertifiedArc, NonArcWitness, Skipped, Error, Info };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Undecided: return "UNDECIDED";
        case Verdict::CertifiedArc: return "CERTIFIED_ARC";
        case Verdict::NonArcWitness: return "NON_ARC_WITNESS";
        case Verdict::Skipped: return "SKIPPED";
        case Verdict::Error: return "ERROR";
        case Verdict::Info: return "INFO";
    }
    return "?";
}

inline Verdict verdict_from_string(std::string_view s) {
    for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Undecided, Verdict::CertifiedArc, Verdict::NonArcWitness,
                      Verdict::Skipped, Verdict::Error, Verdict::Info})
        if (to_string(v) == s) return v;
    throw SchemaError("verdict", "unknown verdict '" + std::string(s) + "'");
}

/// How a number in a report was obtained.
enum class Provenance { None, Exact, CertifiedLowerBound, CertifiedUpperBound, Estimate, Numeric };

inline std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::None: return "";
        case Provenance::Exact: return "exact";
        case Provenance::CertifiedLowerBound: return "certified-lower-bound";
        case Provenance::CertifiedUpperBound: return "certified-upper-bound";
        case Provenance::Estimate: return "estimate";
        case Provenance::Numeric: return "numeric";
    }
    return "";
}

inline Provenance provenance_from_string(std::string_view s) {
    for (Provenance p : {Provenance::None, Provenance::Exact, Provenance::CertifiedLowerBound, Provenance::CertifiedUpperBound,
                         Provenance::Estimate, Provenance::Numeric})
        if (to_string(p) == s) return p;
    throw SchemaError("provenance", "unknown provenance '" + std::string(s) + "'");
}

struct Field {
    using Value = std::variant<std::string, std::int64_t, double, bool>;
    std::string key;
    Value value;
    Provenance provenance = Provenance::None;

    friend bool operator==(const Field&, const Field&) = default;
};

inline std::string format_real(double v, int digits = 15) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Outcome of one analysis stage: a verdict, ordered fields, and nested stages.
struct AnalysisReport {
    std::string name;
    Verdict verdict = Verdict::Info;
    std::vector<Field> fields;
    std::vector<AnalysisReport> children;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;

    AnalysisReport& set(std::string key, Field::Value v, Provenance p = Provenance::None) {
        for (auto& f : fields)
            if (f.key == key) {
                f.value = std::move(v);
                f.provenance = p;
                return *this;
            }
        fields.push_back({std::move(key), std::move(v), p});
        return *this;
    }
    AnalysisReport& set(std::string key, const char* v) { return set(std::move(key), Field::Value{std::string(v)}); }
    AnalysisReport& set(std::string key, std::string v) { return set(std::move(key), Field::Value{std::move(v)}); }
    AnalysisReport& set(std::string key, double v, Provenance p = Provenance::None) { return set(std::move(key), Field::Value{v}, p); }
    AnalysisReport& set(std::string key, bool v) { return set(std::move(key), Field::Value{v}); }
    template <class I>
        requires(std::is_integral_v<I> && !std::is_same_v<I, bool>)
    AnalysisReport& set(std::string key, I v, Provenance p = Provenance::None) {
        return set(std::move(key), Field::Value{static_cast<std::int64_t>(v)}, p);
    }

    const Field* find(std::string_view key) const {
        for (const auto& f : fields)
            if (f.key == key) return &f;
        return nullptr;
    }

    double real(std::string_view key) const {
        const Field* f = find(key);
        if (!f) throw InvalidInput("report '" + name + "' has no field '" + std::string(key) + "'");
        if (const auto* d = std::get_if<double>(&f->value)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&f->value)) return static_cast<double>(*i);
        throw InvalidInput("field '" + std::string(key) + "' is not numeric");
    }
    std::int64_t integer(std::string_view key) const {
        const Field* f = find(key);
        if (!f || !std::holds_alternative<std::int64_t>(f->value)) throw InvalidInput("no integer field '" + std::string(key) + "'");
        return std::get<std::int64_t>(f->value);
    }
    std::string text(std::string_view key) const {
        const Field* f = find(key);
        if (!f || !std::holds_alternative<std::string>(f->value)) throw InvalidInput("no text field '" + std::string(key) + "'");
        return std::get<std::string>(f->value);
    }
    bool flag(std::string_view key) const {
        const Field* f = find(key);
        if (!f || !std::holds_alternative<bool>(f->value)) throw InvalidInput("no boolean field '" + std::string(key) + "'");
        return std::get<bool>(f->value);
    }

    const AnalysisReport* child(std::string_view n) const {
        for (const auto& c : children)
            if (c.name == n) return &c;
        return nullptr;
    }

    AnalysisReport& add(AnalysisReport c) {
        children.push_back(std::move(c));
        return children.back();
    }
};

namespace detail {
inline void write_text(const AnalysisReport& r, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth * 2), ' ');
    out += pad + "[" + r.name + "] " + std::string(to_string(r.verdict)) + "\n";
    for (const auto& f : r.fields) {
        out += pad + "  " + f.key + ": ";
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) out += v;
                else if constexpr (std::is_same_v<T, bool>) out += v ? "true" : "false";
                else if constexpr (std::is_same_v<T, double>) out += format_real(v);
                else out += std::to_string(v);
            },
            f.value);
        if (f.provenance != Provenance::None) out += " (" + std::string(to_string(f.provenance)) + ")";
        out += "\n";
    }
    for (const auto& c : r.children) write_text(c, out, depth + 1);
}
}  // namespace detail

/// Human-readable form; reals are printed with 15 significant digits.
inline std::string to_text(const AnalysisReport& r) {
    std::string out;
    detail::write_text(r, out, 0);
    return out;
}

inline nlohmann::ordered_json to_json(const AnalysisReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["verdict"] = std::string(to_string(r.verdict));
    auto fields = nlohmann::ordered_json::array();
    for (const auto& f : r.fields) {
        nlohmann::ordered_json jf;
        jf["key"] = f.key;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) jf["text"] = v;
                else if constexpr (std::is_same_v<T, bool>) jf["bool"] = v;
                else if constexpr (std::is_same_v<T, double>) jf["real"] = v;
                else jf["int"] = v;
            },
            f.value);
        if (f.provenance != Provenance::None) jf["provenance"] = std::string(to_string(f.provenance));
        fields.push_back(std::move(jf));
    }
    j["fields"] = std::move(fields);
    if (!r.children.empty()) {
        auto cs = nlohmann::ordered_json::array();
        for (const auto& c : r.children) cs.push_back(to_json(c));
        j["children"] = std::move(cs);
    }
    return j;
}

inline AnalysisReport report_from_json(const nlohmann::ordered_json& j) {
    AnalysisReport r;
    try {
        r.name = j.at("name").get<std::string>();
        r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        for (const auto& jf : j.at("fields")) {
            Field f;
            f.key = jf.at("key").get<std::string>();
            if (jf.contains("text")) f.value = jf["text"].get<std::string>();
            else if (jf.contains("bool")) f.value = jf["bool"].get<bool>();
            else if (jf.contains("real")) f.value = jf["real"].get<double>();
            else f.value = jf.at("int").get<std::int64_t>();
            if (jf.contains("provenance")) f.provenance = provenance_from_string(jf["provenance"].get<std::string>());
            r.fields.push_back(std::move(f));
        }
        if (j.contains("children"))
            for (const auto& c : j["children"]) r.children.push_back(report_from_json(c));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("report", e.what());
    }
    return r;
}

/// Structured (JSON) form; lossless, doubles are written with round-trip precision.
inline std::string to_structured(const AnalysisReport& r) { return to_json(r).dump(2) + "\n"; }

inline AnalysisReport parse_structured(std::string_view text) {
    try {
        return report_from_json(nlohmann::ordered_json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("report", e.what());
    }
}

}  // namespace ifsarc
