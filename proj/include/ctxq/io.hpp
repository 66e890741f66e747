#pragma once

// JSON forms of matrices, projector systems, refinements, contexts, posets,
// valuations, Born reports, sections and fixtures. Spectrum indices and
// refinement maps are 1-based on the wire and 0-based in memory.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxq/born.hpp"
#include "ctxq/context.hpp"
#include "ctxq/fixtures.hpp"
#include "ctxq/projector_system.hpp"
#include "ctxq/sections.hpp"
#include "ctxq/valuation.hpp"

namespace ctxq::io {

using nlohmann::json;

/// Malformed input: unreadable file, invalid JSON, or wrong schema.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const json &field(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

template <typename T>
T get(const json &j, const char *what) {
    try {
        return j.get<T>();
    } catch (const json::exception &e) {
        throw ParseError(std::string("bad ") + what + ": " + e.what());
    }
}

}  // namespace detail

inline json to_json(const CMatrix &m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.n(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.n(); ++j) row.push_back({{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
        rows.push_back(std::move(row));
    }
    return {{"n", m.n()}, {"entries", std::move(rows)}};
}

inline CMatrix matrix_from_json(const json &j) {
    const auto n = detail::get<std::size_t>(detail::field(j, "n"), "matrix dimension");
    const json &rows = detail::field(j, "entries");
    if (n == 0 || !rows.is_array() || rows.size() != n) throw ParseError("matrix must have n > 0 rows of entries");
    std::vector<Complex> entries;
    entries.reserve(n * n);
    for (const json &row : rows) {
        if (!row.is_array() || row.size() != n) throw ParseError("matrix row has wrong length");
        for (const json &z : row) {
            entries.emplace_back(detail::get<double>(detail::field(z, "re"), "real part"),
                                 detail::get<double>(detail::field(z, "im"), "imaginary part"));
        }
    }
    return CMatrix(n, std::move(entries));
}

inline json to_json(const ProjectorSystem &s) {
    json ps = json::array();
    for (const auto &p : s.projectors()) ps.push_back(to_json(p));
    return {{"dim", s.dim()}, {"projectors", std::move(ps)}};
}

inline ProjectorSystem system_from_json(const json &j, const Tolerance &tol = {}) {
    const auto dim = detail::get<std::size_t>(detail::field(j, "dim"), "system dimension");
    const json &ps = detail::field(j, "projectors");
    if (!ps.is_array()) throw ParseError("projectors must be an array");
    std::vector<CMatrix> mats;
    for (const json &p : ps) mats.push_back(matrix_from_json(p));
    for (const auto &m : mats)
        if (m.n() != dim) throw Error(ErrorKind::DimensionMismatch, "projector dimension differs from system dim");
    return validate_system(std::move(mats), tol);
}

inline json to_json(const OrderedPartition &p) { return p.parts; }

inline json to_json(const Refinement &r) {
    std::vector<std::size_t> one_based(r.map);
    for (auto &x : one_based) ++x;
    return {{"source", r.source.parts}, {"target", r.target.parts}, {"map", one_based}};
}

inline Refinement refinement_from_json(const json &j) {
    Refinement r;
    r.source.parts = detail::get<std::vector<std::size_t>>(detail::field(j, "source"), "refinement source");
    r.target.parts = detail::get<std::vector<std::size_t>>(detail::field(j, "target"), "refinement target");
    r.map = detail::get<std::vector<std::size_t>>(detail::field(j, "map"), "refinement map");
    for (auto &x : r.map) {
        if (x == 0) throw Error(ErrorKind::IndexOutOfRange, "refinement map is 1-based");
        --x;
    }
    return r;
}

inline json to_json(const Context &c) { return {{"id", c.id}, {"system", to_json(c.system)}}; }

inline Context context_from_json(const json &j, const Tolerance &tol = {}) {
    auto id = detail::get<std::string>(detail::field(j, "id"), "context id");
    ProjectorSystem s = system_from_json(detail::field(j, "system"), tol);
    const std::string expected = context_id(s);
    if (expected != id) throw Error(ErrorKind::UnknownContext, "context id " + id + " does not match its system (" + expected + ")");
    return Context{std::move(id), std::move(s)};
}

inline json to_json(const ContextPoset &p) {
    json contexts = json::array();
    for (const auto &c : p.contexts()) contexts.push_back(to_json(c));
    json order = json::array();
    for (const auto &pair : p.order()) {
        order.push_back({{"low", p[pair.low].id}, {"high", p[pair.high].id}, {"refinement", to_json(pair.refinement)}});
    }
    return {{"dim", p.dim()}, {"contexts", std::move(contexts)}, {"order", std::move(order)}};
}

inline ContextPoset poset_from_json(const json &j, const Tolerance &tol = {}) {
    const auto dim = detail::get<std::size_t>(detail::field(j, "dim"), "poset dimension");
    const json &cs = detail::field(j, "contexts");
    const json &os = detail::field(j, "order");
    if (!cs.is_array() || !os.is_array()) throw ParseError("contexts and order must be arrays");
    std::vector<Context> contexts;
    std::map<std::string, std::size_t> index;
    for (const json &c : cs) {
        contexts.push_back(context_from_json(c, tol));
        index.emplace(contexts.back().id, contexts.size() - 1);
    }
    std::vector<OrderPair> order;
    for (const json &o : os) {
        const auto low = detail::get<std::string>(detail::field(o, "low"), "order low");
        const auto high = detail::get<std::string>(detail::field(o, "high"), "order high");
        if (!index.contains(low) || !index.contains(high)) throw Error(ErrorKind::UnknownContext, low + " <= " + high);
        order.push_back({index.at(low), index.at(high), refinement_from_json(detail::field(o, "refinement"))});
    }
    return ContextPoset::from_parts(dim, std::move(contexts), std::move(order), tol);
}

template <typename P>
json to_json(const FiniteValuation<P> &v) {
    return {{"points", v.points()}, {"weights", v.weights()}};
}

template <typename P>
FiniteValuation<P> valuation_from_json(const json &j) {
    return FiniteValuation<P>(detail::get<std::vector<P>>(detail::field(j, "points"), "valuation points"),
                              detail::get<std::vector<double>>(detail::field(j, "weights"), "valuation weights"));
}

inline json to_json(const Section &s) {
    json a = json::object();
    for (const auto &[id, p] : s.assignment) a[id] = p + 1;
    return {{"assignment", std::move(a)}};
}

inline Section section_from_json(const json &j) {
    Section s;
    const json &a = detail::field(j, "assignment");
    if (!a.is_object()) throw ParseError("assignment must be an object");
    for (auto it = a.begin(); it != a.end(); ++it) {
        const auto p = detail::get<std::size_t>(it.value(), "assigned point");
        if (p == 0) throw Error(ErrorKind::IndexOutOfRange, "section points are 1-based");
        s.assignment[it.key()] = p - 1;
    }
    return s;
}

/// Born report; `violations` lists invariant failures (empty when clean).
inline json born_report(const BornTable &t, const std::vector<std::string> &violations) {
    json rows = json::array();
    for (std::size_t i = 0; i < t.rows(); ++i) rows.push_back(t.row(i));
    return {{"left", t.left().id},
            {"right", t.right().id},
            {"rows", std::move(rows)},
            {"row_marginals", t.row_marginals()},
            {"col_marginals", t.col_marginals()},
            {"total", t.total()},
            {"violations", violations}};
}

inline std::string born_csv(const BornTable &t) {
    std::ostringstream out;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) out << (j ? "," : "") << json(t(i, j)).dump();
        out << "\n";
    }
    return out.str();
}

inline json to_json(const Fixture &f) {
    json families = json::array();
    for (const auto &fam : f.families) {
        json obs = json::array();
        for (const auto &m : fam) obs.push_back(to_json(m));
        families.push_back(std::move(obs));
    }
    json expected = json::object();
    if (f.expected.section_exists) expected["section_exists"] = *f.expected.section_exists;
    if (f.expected.contexts) expected["contexts"] = *f.expected.contexts;
    json j = {{"name", f.name}, {"dim", f.dim}, {"families", std::move(families)}, {"expected", std::move(expected)}};
    if (f.seed) j["seed"] = *f.seed;
    return j;
}

inline std::vector<CMatrix> family_from_json(const json &j) {
    if (!j.is_array()) throw ParseError("an observable family must be an array of matrices");
    std::vector<CMatrix> fam;
    for (const json &m : j) fam.push_back(matrix_from_json(m));
    return fam;
}

inline Fixture fixture_from_json(const json &j) {
    Fixture f;
    f.name = detail::get<std::string>(detail::field(j, "name"), "fixture name");
    f.dim = detail::get<std::size_t>(detail::field(j, "dim"), "fixture dim");
    if (j.contains("seed")) f.seed = detail::get<std::uint64_t>(j.at("seed"), "fixture seed");
    const json &fams = detail::field(j, "families");
    if (!fams.is_array()) throw ParseError("families must be an array");
    for (const json &fam : fams) f.families.push_back(family_from_json(fam));
    if (j.contains("expected")) {
        const json &e = j.at("expected");
        if (e.contains("section_exists")) f.expected.section_exists = detail::get<bool>(e.at("section_exists"), "section_exists");
        if (e.contains("contexts")) f.expected.contexts = detail::get<std::size_t>(e.at("contexts"), "contexts");
    }
    return f;
}

/// Observable families from one input document: a bare array of matrices,
/// {"observables": [...]}, or a fixture with "families".
inline std::vector<std::vector<CMatrix>> families_from_json(const json &j) {
    if (j.is_array()) return {family_from_json(j)};
    if (j.is_object() && j.contains("families")) return fixture_from_json(j).families;
    if (j.is_object() && j.contains("observables")) return {family_from_json(j.at("observables"))};
    throw ParseError("expected a matrix array, {\"observables\": [...]}, or a fixture with \"families\"");
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Keys sorted, shortest round-trip floats, two-space indent, trailing newline.
inline std::string dump(const json &j) { return j.dump(2) + "\n"; }

}  // namespace ctxq::io
