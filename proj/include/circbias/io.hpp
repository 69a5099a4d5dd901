#pragma once

/**
 * @file io.hpp
 * @brief JSON readers and writers for configurations, runner systems and polynomials.
 *
 * Exact values are written as strings: a decimal when the rational
 * terminates, "p/q" otherwise. Readers accept those strings, integers,
 * {"num": p, "den": q} objects and plain JSON floats (taken at their
 * shortest round-trip decimal). Floats are printed with 17 significant
 * digits so that output bytes depend only on the values.
 *
 * Every reader unwraps {"manifest": ..., "result": ...} documents, so the
 * output of one command can be fed to another.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "circbias/circle.hpp"
#include "circbias/errors.hpp"
#include "circbias/newton.hpp"
#include "circbias/rational.hpp"
#include "circbias/runners.hpp"
#include "circbias/unipoly.hpp"

namespace circbias::io {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

/// The "result" member of a manifest document, or the document itself.
inline const Json& unwrap(const Json& j) {
    if (j.is_object() && j.contains("manifest") && j.contains("result")) return j.at("result");
    return j;
}

inline std::string format_double(double x) {
    if (std::isnan(x)) return "null";
    if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace detail {

inline void dump(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case Json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    case Json::value_t::array: {
        if (j.empty()) { out += "[]"; return; }
        const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += ',';
            first = false;
            if (flat) {
                if (out.back() == ',') out += ' ';
            } else {
                out += '\n' + pad;
            }
            dump(e, out, indent, depth + 1);
        }
        if (!flat) out += '\n' + close;
        out += ']';
        return;
    }
    case Json::value_t::object: {
        if (j.empty()) { out += "{}"; return; }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += '\n' + pad + Json(it.key()).dump() + ": ";
            dump(it.value(), out, indent, depth + 1);
        }
        out += '\n' + close + '}';
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace detail

/// Deterministic pretty printer with 17-significant-digit floats.
inline std::string dump(const Json& j, int indent = 2) {
    std::string out;
    detail::dump(j, out, indent, 0);
    out += '\n';
    return out;
}

inline Json rational_to_json(const Rational& q) {
    std::string s;
    if (decimal_string(q, s)) return s;
    return to_string(q);
}

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float()) {
        const double x = j.get<double>();
        if (!std::isfinite(x)) throw InvalidArgument("non-finite number in input");
        return parse_rational(Json(x).dump());
    }
    if (j.is_object() && j.contains("num") && j.contains("den")) {
        const Rational num = rational_from_json(j.at("num")), den = rational_from_json(j.at("den"));
        require(den != 0, "zero denominator in input");
        return num / den;
    }
    throw InvalidArgument("expected a number, a rational string or {num, den}, got " + j.dump());
}

inline double double_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    return to_double(rational_from_json(j));
}

inline std::vector<Rational> rational_list(const Json& j, const char* what) {
    if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
    std::vector<Rational> out;
    for (const auto& e : j) out.push_back(rational_from_json(e));
    return out;
}

inline Json to_json(const std::vector<Rational>& v) {
    Json out = Json::array();
    for (const auto& q : v) out.push_back(rational_to_json(q));
    return out;
}

/// {"points": [...]} or a bare array.
inline PointConfiguration<Rational> points_from_json(const Json& doc) {
    const Json& j = unwrap(doc);
    if (j.is_array()) return PointConfiguration<Rational>(rational_list(j, "points"));
    if (j.is_object() && j.contains("points")) return PointConfiguration<Rational>(rational_list(j.at("points"), "points"));
    throw InvalidArgument("expected {\"points\": [...]} or an array of points");
}

inline Json to_json(const PointConfiguration<Rational>& cfg) {
    return Json{{"points", to_json(std::vector<Rational>(cfg.points().begin(), cfg.points().end()))}};
}

inline Json to_json(const BiasReport<Rational>& r) {
    return Json{{"bias", rational_to_json(r.bias)},
                {"bias_float", to_double(r.bias)},
                {"alpha", rational_to_json(r.witness.alpha)},
                {"gamma", rational_to_json(r.witness.gamma)},
                {"count", r.count},
                {"side", std::string(to_string(r.side))},
                {"n", r.n},
                {"limit_witness", r.side == Side::deficiency}};
}

inline Json to_json(const BiasReport<double>& r) {
    return Json{{"bias", r.bias},
                {"alpha", r.witness.alpha},
                {"gamma", r.witness.gamma},
                {"count", r.count},
                {"side", std::string(to_string(r.side))},
                {"n", r.n},
                {"limit_witness", r.side == Side::deficiency}};
}

inline runners::RunnerSystem<Rational> runners_from_json(const Json& doc) {
    const Json& j = unwrap(doc);
    if (!j.is_object() || !j.contains("starts") || !j.contains("speeds"))
        throw InvalidArgument("runner system needs \"starts\" and \"speeds\"");
    runners::RunnerSystem<Rational> sys{rational_list(j.at("starts"), "starts"), rational_list(j.at("speeds"), "speeds")};
    sys.validate();
    return sys;
}

inline Json to_json(const runners::RunnerSystem<Rational>& sys) {
    return Json{{"starts", to_json(sys.starts)}, {"speeds", to_json(sys.speeds)}};
}

inline Complex complex_from_json(const Json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw InvalidArgument("complex numbers are written [re, im]");
        return {double_from_json(j[0]), double_from_json(j[1])};
    }
    if (j.is_object()) return {double_from_json(j.value("re", Json(0))), double_from_json(j.value("im", Json(0)))};
    return {double_from_json(j), 0.0};
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

/// {"coefficients": [c_0, c_1, ...]} (constant term first) or a bare array.
inline DensePoly dense_from_json(const Json& doc) {
    const Json& j = unwrap(doc);
    const Json* list = &j;
    if (j.is_object()) {
        if (!j.contains("coefficients")) throw InvalidArgument("polynomial needs \"coefficients\"");
        list = &j.at("coefficients");
    }
    if (!list->is_array()) throw InvalidArgument("coefficients must be an array");
    std::vector<Complex> c;
    for (const auto& e : *list) c.push_back(complex_from_json(e));
    return DensePoly(std::move(c));
}

inline Json to_json(const DensePoly& f) {
    Json c = Json::array();
    for (const auto& z : f.coefficients()) c.push_back(to_json(z));
    return Json{{"coefficients", c}};
}

/// {"terms": [{"i": .., "j": .., "re": .., "im": ..}, ...]}
inline newton::SparseBivariatePoly bivariate_from_json(const Json& doc) {
    const Json& j = unwrap(doc);
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
        throw InvalidArgument("bivariate polynomial needs a \"terms\" array");
    newton::SparseBivariatePoly f;
    for (const auto& t : j.at("terms")) {
        if (!t.contains("i") || !t.contains("j")) throw InvalidArgument("each term needs \"i\" and \"j\"");
        const long long i = t.at("i").get<long long>(), jj = t.at("j").get<long long>();
        if (i < 0 || jj < 0) throw InvalidArgument("exponents must be non-negative");
        f.add(i, jj, {double_from_json(t.value("re", Json(0))), double_from_json(t.value("im", Json(0)))});
    }
    if (f.is_zero()) throw InvalidArgument("bivariate polynomial has no non-zero terms");
    return f;
}

inline Json to_json(const newton::SparseBivariatePoly& f) {
    Json terms = Json::array();
    for (const auto& [e, c] : f.terms())
        terms.push_back(Json{{"i", e.i}, {"j", e.j}, {"re", c.real()}, {"im", c.imag()}});
    return Json{{"terms", terms}};
}

inline Json to_json(const newton::Exponent& e) { return Json::array({e.i, e.j}); }

inline Json to_json(const newton::Edge& e) {
    Json out{{"from", to_json(e.from)}, {"to", to_json(e.to)}, {"kind", std::string(newton::to_string(e.kind))}};
    if (e.gradient) {
        out["gradient"] = e.gradient->den == 1 ? std::to_string(e.gradient->num)
                                               : std::to_string(e.gradient->num) + "/" + std::to_string(e.gradient->den);
        out["gradient_float"] = e.gradient->value();
    } else {
        out["gradient"] = nullptr;
    }
    return out;
}

inline Json to_json(const newton::NewtonPolytope& P) {
    Json v = Json::array(), e = Json::array();
    for (const auto& x : P.vertices) v.push_back(to_json(x));
    for (const auto& x : P.edges) e.push_back(to_json(x));
    return Json{{"vertices", v},
                {"edges", e},
                {"lower_edges", P.count(newton::EdgeKind::lower)},
                {"upper_edges", P.count(newton::EdgeKind::upper)},
                {"vertical_edges", P.count(newton::EdgeKind::vertical)}};
}

inline Json to_json(const RootSet& rs) {
    Json roots = Json::array(), res = Json::array();
    for (const auto& z : rs.roots) roots.push_back(to_json(z));
    for (double r : rs.residuals) res.push_back(r);
    return Json{{"roots", roots}, {"zero_multiplicity", rs.zero_multiplicity}, {"residuals", res}};
}

/// CSV text with a header row; values formatted like the JSON floats.
inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
        out << '\n';
    }
    return out.str();
}

} // namespace circbias::io
