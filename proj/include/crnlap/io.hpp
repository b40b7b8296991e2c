#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crnlap/error.hpp"
#include "crnlap/graph.hpp"
#include "crnlap/network.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap::io {

using Json = nlohmann::ordered_json;

enum class NumberMode { automatic, exact, floating };

inline NumberMode parse_mode(std::string_view text)
{
    if (text == "auto") return NumberMode::automatic;
    if (text == "exact") return NumberMode::exact;
    if (text == "float") return NumberMode::floating;
    throw Error(Errc::invalid_argument, "unknown mode '" + std::string(text) + "' (auto|exact|float)");
}

/// A document number: exact when written as an integer, a string or a
/// {"num", "den"} pair; inexact when written as a JSON float.
struct Number {
    std::optional<Rational> exact;
    double value = 0.0;

    friend bool operator==(const Number& a, const Number& b)
    {
        if (a.exact.has_value() != b.exact.has_value()) return false;
        return a.exact ? *a.exact == *b.exact : a.value == b.value;
    }
};

inline Number exact_number(const Rational& q) { return {q, to_double(q)}; }

struct VertexEntry {
    std::string id;
    std::vector<std::pair<std::string, Number>> complex; // species order

    friend bool operator==(const VertexEntry&, const VertexEntry&) = default;
};

struct EdgeEntry {
    std::string from;
    std::string to;
    Number k;

    friend bool operator==(const EdgeEntry&, const EdgeEntry&) = default;
};

struct NetworkDocument {
    std::vector<std::string> species;
    std::vector<VertexEntry> vertices;
    std::vector<EdgeEntry> edges;
    Json metadata = Json::object();

    friend bool operator==(const NetworkDocument&, const NetworkDocument&) = default;
};

using AnyNetwork = std::variant<ReactionNetwork<Rational>, ReactionNetwork<double>>;

struct ParsedNetwork {
    NetworkDocument document;
    AnyNetwork network;

    bool exact() const noexcept { return network.index() == 0; }
};

namespace detail {

[[noreturn]] inline void schema(const std::string& path, const std::string& what)
{
    throw Error(Errc::schema_error, path + ": " + what, path);
}

[[noreturn]] inline void semantic(Errc cause, const std::string& path, const std::string& what)
{
    throw Error(Errc::semantic_error, std::string(errc_name(cause)) + ": " + path + ": " + what, path);
}

inline Rational integer_text(const Json& j, const std::string& path)
{
    if (j.is_number_integer()) return Rational(j.dump());
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        try {
            Rational q = parse_rational(s);
            if (is_integer(q) && s.find_first_of("./eE") == std::string::npos) return q;
        } catch (const Error&) {
        }
        schema(path, "'" + s + "' is not an integer");
    }
    schema(path, "expected an integer");
}

inline Number parse_number(const Json& j, const std::string& path, NumberMode mode)
{
    Number n;
    if (j.is_number_integer()) {
        n.exact = Rational(j.dump());
    } else if (j.is_number_float()) {
        if (mode == NumberMode::exact)
            schema(path, "inexact number " + j.dump() + " in exact mode (write it as a string or a num/den pair)");
        n.value = j.get<double>();
        return n;
    } else if (j.is_string()) {
        try {
            n.exact = parse_rational(j.get<std::string>());
        } catch (const Error&) {
            schema(path, "'" + j.get<std::string>() + "' is not a number");
        }
    } else if (j.is_object()) {
        if (!j.contains("num") || !j.contains("den") || j.size() != 2)
            schema(path, "a rational needs exactly the fields \"num\" and \"den\"");
        const Rational num = integer_text(j.at("num"), path + ".num");
        const Rational den = integer_text(j.at("den"), path + ".den");
        if (den == 0) schema(path + ".den", "zero denominator");
        n.exact = num / den;
    } else {
        schema(path, "expected a number");
    }
    n.value = to_double(*n.exact);
    return n;
}

inline const Json& field(const Json& j, const char* name, const std::string& path)
{
    if (!j.is_object()) schema(path, "expected an object");
    if (!j.contains(name)) schema(path, "missing field \"" + std::string(name) + "\"");
    return j.at(name);
}

inline std::string string_field(const Json& j, const char* name, const std::string& path)
{
    const Json& v = field(j, name, path);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    schema(path + "." + name, "expected a string");
}

template <class T>
T convert(const Number& n)
{
    if constexpr (is_exact_v<T>)
        return *n.exact;
    else
        return n.value;
}

template <class T>
ReactionNetwork<T> build(const NetworkDocument& doc)
{
    std::map<std::string, Index> species_index;
    for (std::size_t s = 0; s < doc.species.size(); ++s) species_index[doc.species[s]] = static_cast<Index>(s);
    Matrix<T> y = Matrix<T>::Zero(static_cast<Index>(doc.species.size()), static_cast<Index>(doc.vertices.size()));
    std::vector<std::string> ids;
    for (std::size_t v = 0; v < doc.vertices.size(); ++v) {
        ids.push_back(doc.vertices[v].id);
        for (const auto& [name, value] : doc.vertices[v].complex)
            y(species_index.at(name), static_cast<Index>(v)) = convert<T>(value);
    }
    std::vector<EdgeSpec<T>> edges;
    for (const auto& e : doc.edges) edges.push_back({e.from, e.to, convert<T>(e.k)});
    return build_network(doc.species, std::move(y), build_digraph(std::move(ids), edges));
}

} // namespace detail

/// Structural parse with field-path diagnostics; semantic checks follow in
/// parse_network.
inline NetworkDocument parse_document(const Json& root, NumberMode mode = NumberMode::automatic)
{
    using detail::schema;
    NetworkDocument doc;
    if (!root.is_object()) schema("$", "expected an object");

    const Json& species = detail::field(root, "species", "$");
    if (!species.is_array()) schema("species", "expected an array");
    for (std::size_t s = 0; s < species.size(); ++s) {
        if (!species[s].is_string()) schema("species[" + std::to_string(s) + "]", "expected a string");
        doc.species.push_back(species[s].get<std::string>());
    }
    std::set<std::string> known(doc.species.begin(), doc.species.end());
    if (known.size() != doc.species.size()) detail::semantic(Errc::invalid_argument, "species", "duplicate species name");

    const Json& vertices = detail::field(root, "vertices", "$");
    if (!vertices.is_array()) schema("vertices", "expected an array");
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        const std::string path = "vertices[" + std::to_string(v) + "]";
        VertexEntry entry;
        entry.id = detail::string_field(vertices[v], "id", path);
        const Json& complex = detail::field(vertices[v], "complex", path);
        if (!complex.is_object()) schema(path + ".complex", "expected an object mapping species to numbers");
        for (const auto& [name, value] : complex.items())
            if (!known.count(name)) detail::semantic(Errc::invalid_argument, path + ".complex." + name, "unknown species");
        for (const auto& name : doc.species) {
            if (!complex.contains(name)) continue;
            entry.complex.emplace_back(name, detail::parse_number(complex.at(name), path + ".complex." + name, mode));
        }
        doc.vertices.push_back(std::move(entry));
    }

    const Json& edges = detail::field(root, "edges", "$");
    if (!edges.is_array()) schema("edges", "expected an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::string path = "edges[" + std::to_string(e) + "]";
        EdgeEntry entry;
        entry.from = detail::string_field(edges[e], "from", path);
        entry.to = detail::string_field(edges[e], "to", path);
        entry.k = detail::parse_number(detail::field(edges[e], "k", path), path + ".k", mode);
        doc.edges.push_back(std::move(entry));
    }

    if (root.contains("metadata")) {
        if (!root.at("metadata").is_object()) schema("metadata", "expected an object");
        doc.metadata = root.at("metadata");
    }
    for (const auto& [key, value] : root.items())
        if (key != "species" && key != "vertices" && key != "edges" && key != "metadata")
            schema(key, "unknown top-level field");
    return doc;
}

/// Semantic validation (with field paths) and network construction. Exact
/// arithmetic is used when every number is exact and every complex integral
/// (automatic mode), or when requested.
inline ParsedNetwork build_from_document(NetworkDocument doc, NumberMode mode = NumberMode::automatic)
{
    using detail::semantic;
    std::map<std::string, std::size_t> vertex_index;
    for (std::size_t v = 0; v < doc.vertices.size(); ++v) {
        const std::string path = "vertices[" + std::to_string(v) + "]";
        if (!vertex_index.emplace(doc.vertices[v].id, v).second)
            semantic(Errc::duplicate_vertex, path + ".id", "vertex '" + doc.vertices[v].id + "' declared twice");
        for (const auto& [name, value] : doc.vertices[v].complex)
            if (value.value < 0 || (value.exact && *value.exact < 0))
                semantic(Errc::negative_complex_entry, path + ".complex." + name, "negative stoichiometric coefficient");
    }
    for (std::size_t a = 0; a < doc.vertices.size(); ++a)
        for (std::size_t b = a + 1; b < doc.vertices.size(); ++b) {
            auto dense = [&](std::size_t v) {
                std::map<std::string, double> m;
                for (const auto& [name, value] : doc.vertices[v].complex)
                    if (value.value != 0.0) m[name] = value.value;
                return m;
            };
            auto exact_dense = [&](std::size_t v) {
                std::map<std::string, Rational> m;
                for (const auto& [name, value] : doc.vertices[v].complex)
                    if (value.exact && *value.exact != 0) m[name] = *value.exact;
                return m;
            };
            const bool same = dense(a) == dense(b) && exact_dense(a) == exact_dense(b);
            if (same)
                semantic(Errc::duplicate_complex, "vertices[" + std::to_string(b) + "].complex",
                         "same complex as vertex '" + doc.vertices[a].id + "'");
        }
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t e = 0; e < doc.edges.size(); ++e) {
        const std::string path = "edges[" + std::to_string(e) + "]";
        const auto& edge = doc.edges[e];
        if (!vertex_index.count(edge.from)) semantic(Errc::unknown_endpoint, path + ".from", "unknown vertex '" + edge.from + "'");
        if (!vertex_index.count(edge.to)) semantic(Errc::unknown_endpoint, path + ".to", "unknown vertex '" + edge.to + "'");
        if (edge.from == edge.to) semantic(Errc::self_loop, path, "self-loop at '" + edge.from + "'");
        if (!seen.emplace(edge.from, edge.to).second) semantic(Errc::duplicate_edge, path, "edge declared twice");
        const bool positive = edge.k.exact ? *edge.k.exact > 0 : edge.k.value > 0;
        if (!positive) semantic(Errc::non_positive_label, path + ".k", "rate constant must be positive");
    }

    bool all_exact = true, integral = true;
    for (const auto& v : doc.vertices)
        for (const auto& [name, value] : v.complex) {
            all_exact = all_exact && value.exact.has_value();
            integral = integral && value.exact && is_integer(*value.exact);
        }
    for (const auto& e : doc.edges) all_exact = all_exact && e.k.exact.has_value();

    bool use_exact = false;
    if (mode == NumberMode::exact) {
        if (!all_exact) detail::schema("$", "inexact numbers in exact mode");
        use_exact = true;
    } else if (mode == NumberMode::automatic) {
        use_exact = all_exact && integral;
    }

    try {
        if (use_exact) {
            auto net = detail::build<Rational>(doc);
            return {std::move(doc), AnyNetwork(std::in_place_index<0>, std::move(net))};
        }
        auto net = detail::build<double>(doc);
        return {std::move(doc), AnyNetwork(std::in_place_index<1>, std::move(net))};
    } catch (const Error& err) {
        if (err.code() == Errc::schema_error || err.code() == Errc::semantic_error) throw;
        semantic(err.code(), "$", err.detail());
    }
}

inline ParsedNetwork parse_network(std::string_view text, NumberMode mode = NumberMode::automatic)
{
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& err) {
        throw Error(Errc::schema_error, std::string("malformed JSON: ") + err.what(), "$");
    }
    return build_from_document(parse_document(root, mode), mode);
}

// ---------------------------------------------------------------------------
// Serialization

inline Json bigint_json(const BigInt& v)
{
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return Json(v.convert_to<std::int64_t>());
    return Json(v.str());
}

/// Exact numbers: integer, or {"num": p, "den": q}; floats: shortest
/// round-trip decimal.
inline Json number_json(const Rational& q)
{
    if (is_integer(q)) return bigint_json(numerator_of(q));
    Json j = Json::object();
    j["num"] = bigint_json(numerator_of(q));
    j["den"] = bigint_json(denominator_of(q));
    return j;
}

inline Json number_json(double d)
{
    if (!std::isfinite(d)) return Json(nullptr);
    return Json(d);
}

inline Json number_json(const Number& n) { return n.exact ? number_json(*n.exact) : number_json(n.value); }

template <class T>
Json vector_json(const Vector<T>& v)
{
    Json j = Json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(number_json(T(v(i))));
    return j;
}

template <class T>
Json matrix_json(const Matrix<T>& m)
{
    Json j = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(number_json(T(m(r, c))));
        j.push_back(std::move(row));
    }
    return j;
}

/// Columns of a basis matrix as a list of vectors.
template <class T>
Json columns_json(const Matrix<T>& m)
{
    Json j = Json::array();
    for (Index c = 0; c < m.cols(); ++c) j.push_back(vector_json(Vector<T>(m.col(c))));
    return j;
}

inline Json serialize_document(const NetworkDocument& doc)
{
    Json root = Json::object();
    root["species"] = doc.species;
    Json vertices = Json::array();
    for (const auto& v : doc.vertices) {
        Json complex = Json::object();
        for (const auto& [name, value] : v.complex) complex[name] = number_json(value);
        vertices.push_back({{"id", v.id}, {"complex", complex}});
    }
    root["vertices"] = vertices;
    Json edges = Json::array();
    for (const auto& e : doc.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"k", number_json(e.k)}});
    root["edges"] = edges;
    if (!doc.metadata.empty()) root["metadata"] = doc.metadata;
    return root;
}

inline std::string serialize_network(const NetworkDocument& doc, int indent = 2)
{
    return serialize_document(doc).dump(indent);
}

// ---------------------------------------------------------------------------
// Command-line helpers

/// Comma-separated numbers, e.g. "0.5,1/3,2".
inline std::vector<Rational> parse_number_list(std::string_view text)
{
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string_view part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_rational(part));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline Vector<double> parse_state(std::string_view text, std::size_t expected)
{
    const auto values = parse_number_list(text);
    if (values.size() != expected)
        throw Error(Errc::shape_mismatch, "expected " + std::to_string(expected) + " comma-separated values, got " +
                                              std::to_string(values.size()));
    Vector<double> x(static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) x(static_cast<Index>(i)) = to_double(values[i]);
    return x;
}

inline std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// "chain:1,2,3;4,5" or "star:root=1;root=4" (the "root=" prefix is
/// optional). Specs are matched to components through their vertices, in any
/// order; single-vertex components may be omitted.
template <class T>
AuxTree parse_aux_spec(const LabeledDigraph<T>& g, std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw Error(Errc::invalid_argument, "aux spec must start with 'chain:' or 'star:'");
    const std::string_view kind = spec.substr(0, colon);
    const auto parts = split(spec.substr(colon + 1), ';');
    auto vertex = [&](std::string id) {
        while (!id.empty() && id.front() == ' ') id.erase(id.begin());
        while (!id.empty() && id.back() == ' ') id.pop_back();
        auto v = g.find_vertex(id);
        if (!v) throw Error(Errc::root_not_in_graph, "unknown vertex '" + id + "' in aux spec");
        return *v;
    };
    const auto& comps = g.components();

    if (kind == "chain") {
        std::vector<std::optional<std::vector<VertexIndex>>> orders(comps.size());
        for (const auto& part : parts) {
            std::vector<VertexIndex> order;
            for (const auto& id : split(part, ',')) order.push_back(vertex(id));
            const std::size_t c = g.component_of(order.front());
            if (orders[c]) throw Error(Errc::bad_order, "component " + std::to_string(c) + " ordered twice");
            orders[c] = std::move(order);
        }
        std::vector<std::vector<VertexIndex>> full;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (!orders[c] && comps[c].size() > 1)
                throw Error(Errc::bad_order, "no order given for the component of vertex '" + g.vertex_id(comps[c][0]) + "'");
            full.push_back(orders[c] ? *orders[c] : comps[c]);
        }
        return make_chain_tree(g, full);
    }
    if (kind == "star") {
        std::vector<std::optional<VertexIndex>> roots(comps.size());
        for (auto part : parts) {
            if (part.rfind("root=", 0) == 0) part = part.substr(5);
            const VertexIndex r = vertex(part);
            const std::size_t c = g.component_of(r);
            if (roots[c]) throw Error(Errc::bad_order, "component " + std::to_string(c) + " has two roots");
            roots[c] = r;
        }
        std::vector<VertexIndex> full;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (!roots[c] && comps[c].size() > 1)
                throw Error(Errc::bad_order, "no root given for the component of vertex '" + g.vertex_id(comps[c][0]) + "'");
            full.push_back(roots[c] ? *roots[c] : comps[c][0]);
        }
        return make_star_tree(g, full);
    }
    throw Error(Errc::invalid_argument, "unknown aux kind '" + std::string(kind) + "'");
}

template <class T>
std::string aux_spec_string(const LabeledDigraph<T>& g, const AuxTree& aux)
{
    std::string out(aux_kind_name(aux.kind));
    out += ':';
    const auto& comps = g.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (c) out += ';';
        if (aux.kind == AuxKind::star) {
            VertexIndex root = comps[c][0];
            for (std::size_t e = 0; e < aux.edges.size(); ++e)
                if (aux.component[e] == c) root = aux.edges[e].target;
            out += g.vertex_id(root);
        } else if (aux.kind == AuxKind::chain) {
            const auto seq = chain_sequence(aux, c, comps[c]);
            for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? "," : "") + g.vertex_id(seq[i]);
        }
    }
    if (aux.kind == AuxKind::general) {
        out = "general:";
        for (std::size_t e = 0; e < aux.edges.size(); ++e)
            out += (e ? "," : "") + g.vertex_id(aux.edges[e].source) + ">" + g.vertex_id(aux.edges[e].target);
    }
    return out;
}

template <class T>
Json aux_json(const LabeledDigraph<T>& g, const AuxTree& aux)
{
    Json edges = Json::array();
    for (const auto& e : aux.edges) edges.push_back(Json::array({g.vertex_id(e.source), g.vertex_id(e.target)}));
    return {{"kind", std::string(aux_kind_name(aux.kind))}, {"spec", aux_spec_string(g, aux)}, {"edges", edges}};
}

inline Json error_json(const Error& err)
{
    Json j = {{"error", std::string(errc_name(err.code()))}, {"message", err.detail()}};
    if (!err.path().empty()) j["path"] = err.path();
    return j;
}

} // namespace crnlap::io
