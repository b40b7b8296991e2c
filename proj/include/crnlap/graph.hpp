#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crnlap/error.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

template <class T>
struct EdgeSpec {
    std::string source;
    std::string target;
    T label;
};

/**
 * Strongly connected components of a digraph on vertices 0..n-1 (Tarjan).
 *
 * Canonical order: vertices ascending inside a component, components
 * ascending by their smallest vertex index.
 */
inline std::vector<std::vector<VertexIndex>>
strongly_connected_components(std::size_t n,
                              const std::vector<std::pair<VertexIndex, VertexIndex>>& arcs)
{
    std::vector<std::vector<VertexIndex>> adjacency(n);
    for (auto [s, t] : arcs) adjacency[s].push_back(t);

    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<VertexIndex> stack;
    std::vector<std::vector<VertexIndex>> components;
    std::size_t counter = 0;

    struct Frame {
        VertexIndex v;
        std::size_t next;
    };
    for (VertexIndex start = 0; start < n; ++start) {
        if (index[start] != unvisited) continue;
        std::vector<Frame> frames{{start, 0}};
        index[start] = low[start] = counter++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!frames.empty()) {
            Frame& frame = frames.back();
            const VertexIndex v = frame.v;
            if (frame.next < adjacency[v].size()) {
                const VertexIndex w = adjacency[v][frame.next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<VertexIndex> component;
                VertexIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                std::sort(component.begin(), component.end());
                components.push_back(std::move(component));
            }
            frames.pop_back();
            if (!frames.empty()) {
                const VertexIndex parent = frames.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return components;
}

/**
 * A simple digraph with positive edge labels. Vertex ids are opaque strings
 * mapped to dense indices in declaration order; all matrices use that order.
 * Immutable after construction.
 */
template <class T>
class LabeledDigraph {
public:
    struct Edge {
        VertexIndex source;
        VertexIndex target;
        T label;
    };

    LabeledDigraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges)
        : ids_(std::move(vertex_ids)), edges_(std::move(edges))
    {
        for (VertexIndex v = 0; v < ids_.size(); ++v) {
            if (!index_.emplace(ids_[v], v).second)
                throw Error(Errc::duplicate_vertex, "vertex '" + ids_[v] + "' declared twice");
        }
        out_.resize(ids_.size());
        std::vector<std::pair<VertexIndex, VertexIndex>> arcs;
        std::map<std::pair<VertexIndex, VertexIndex>, EdgeIndex> seen;
        for (EdgeIndex e = 0; e < edges_.size(); ++e) {
            const Edge& edge = edges_[e];
            if (edge.source >= ids_.size() || edge.target >= ids_.size())
                throw Error(Errc::unknown_endpoint, "edge " + std::to_string(e) + " has an undeclared endpoint");
            if (edge.source == edge.target)
                throw Error(Errc::self_loop, "edge " + std::to_string(e) + " is a self-loop at '" + ids_[edge.source] + "'");
            if (!(edge.label > T(0)))
                throw Error(Errc::non_positive_label, "edge " + describe(e) + " has a non-positive label");
            if (!seen.emplace(std::pair{edge.source, edge.target}, e).second)
                throw Error(Errc::duplicate_edge, "edge " + describe(e) + " declared twice");
            out_[edge.source].push_back(e);
            arcs.emplace_back(edge.source, edge.target);
        }
        edge_lookup_ = std::move(seen);
        components_ = strongly_connected_components(ids_.size(), arcs);
        component_of_.assign(ids_.size(), 0);
        for (std::size_t c = 0; c < components_.size(); ++c)
            for (VertexIndex v : components_[c]) component_of_[v] = c;
    }

    std::size_t vertex_count() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<std::string>& vertex_ids() const noexcept { return ids_; }
    const std::string& vertex_id(VertexIndex v) const { return ids_.at(v); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
    const std::vector<EdgeIndex>& out_edges(VertexIndex v) const { return out_.at(v); }

    /// SCC partition in canonical order, computed at construction.
    const std::vector<std::vector<VertexIndex>>& components() const noexcept { return components_; }
    std::size_t component_of(VertexIndex v) const { return component_of_.at(v); }

    std::optional<VertexIndex> find_vertex(std::string_view id) const
    {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<EdgeIndex> find_edge(VertexIndex source, VertexIndex target) const
    {
        auto it = edge_lookup_.find({source, target});
        if (it == edge_lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// True when no edge joins two different strongly connected components,
    /// i.e. every connected component is strongly connected.
    bool has_strongly_connected_components() const
    {
        return std::all_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
            return component_of_[e.source] == component_of_[e.target];
        });
    }

    std::string describe(EdgeIndex e) const
    {
        const Edge& edge = edges_.at(e);
        return ids_.at(edge.source) + "->" + ids_.at(edge.target);
    }

    template <class U>
    LabeledDigraph<U> cast() const
    {
        std::vector<typename LabeledDigraph<U>::Edge> edges;
        edges.reserve(edges_.size());
        for (const Edge& e : edges_) {
            if constexpr (std::is_same_v<U, double>)
                edges.push_back({e.source, e.target, to_double(e.label)});
            else
                edges.push_back({e.source, e.target, U(e.label)});
        }
        return LabeledDigraph<U>(ids_, std::move(edges));
    }

private:
    std::vector<std::string> ids_;
    std::map<std::string, VertexIndex> index_;
    std::vector<Edge> edges_;
    std::map<std::pair<VertexIndex, VertexIndex>, EdgeIndex> edge_lookup_;
    std::vector<std::vector<EdgeIndex>> out_;
    std::vector<std::vector<VertexIndex>> components_;
    std::vector<std::size_t> component_of_;
};

template <class T>
LabeledDigraph<T> build_digraph(std::vector<std::string> vertices, const std::vector<EdgeSpec<T>>& edges)
{
    std::map<std::string, VertexIndex> index;
    for (VertexIndex v = 0; v < vertices.size(); ++v)
        if (!index.emplace(vertices[v], v).second)
            throw Error(Errc::duplicate_vertex, "vertex '" + vertices[v] + "' declared twice");
    std::vector<typename LabeledDigraph<T>::Edge> resolved;
    resolved.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto s = index.find(edges[e].source);
        auto t = index.find(edges[e].target);
        if (s == index.end() || t == index.end())
            throw Error(Errc::unknown_endpoint,
                        "edge " + std::to_string(e) + " (" + edges[e].source + "->" + edges[e].target +
                            ") references an undeclared vertex");
        resolved.push_back({s->second, t->second, edges[e].label});
    }
    return LabeledDigraph<T>(std::move(vertices), std::move(resolved));
}

/// Vertex ids "1".."n".
inline std::vector<std::string> numbered_vertices(std::size_t n)
{
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
    return ids;
}

/// Recomputes the SCC partition from scratch.
template <class T>
std::vector<std::vector<VertexIndex>> scc_partition(const LabeledDigraph<T>& g)
{
    std::vector<std::pair<VertexIndex, VertexIndex>> arcs;
    for (const auto& e : g.edges()) arcs.emplace_back(e.source, e.target);
    return strongly_connected_components(g.vertex_count(), arcs);
}

template <class T>
void require_strongly_connected_components(const LabeledDigraph<T>& g)
{
    if (!g.has_strongly_connected_components())
        throw Error(Errc::not_strongly_connected_components,
                    "an edge joins two different strongly connected components");
}

// ---------------------------------------------------------------------------
// Arborescences and cycles

struct Arborescence {
    VertexIndex root;
    std::vector<EdgeIndex> edges; // ascending

    friend bool operator==(const Arborescence&, const Arborescence&) = default;
};

struct Cycle {
    std::vector<VertexIndex> vertices; // starts at the smallest vertex
    std::vector<EdgeIndex> edges;      // edges[i] : vertices[i] -> vertices[i+1 mod len]

    friend bool operator==(const Cycle&, const Cycle&) = default;
};

/**
 * All subgraphs of the subgraph induced by `vertices` in which every vertex
 * outside `roots` is the source of exactly one edge and no cycle occurs, i.e.
 * in-forests whose trees are rooted at `roots`. Edge choices are explored in
 * vertex order and, per vertex, in edge declaration order.
 */
template <class T>
std::vector<std::vector<EdgeIndex>> enumerate_in_forests(const LabeledDigraph<T>& g,
                                                         const std::vector<VertexIndex>& vertices,
                                                         const std::vector<VertexIndex>& roots)
{
    const std::size_t n = g.vertex_count();
    std::vector<bool> inside(n, false), is_root(n, false);
    for (VertexIndex v : vertices) inside[v] = true;
    for (VertexIndex r : roots) is_root[r] = true;

    std::vector<VertexIndex> movers;
    for (VertexIndex v : vertices)
        if (!is_root[v]) movers.push_back(v);
    std::sort(movers.begin(), movers.end());

    std::vector<std::vector<EdgeIndex>> choices(movers.size());
    for (std::size_t i = 0; i < movers.size(); ++i)
        for (EdgeIndex e : g.out_edges(movers[i]))
            if (inside[g.edge(e).target]) choices[i].push_back(e);

    constexpr VertexIndex none = static_cast<VertexIndex>(-1);
    std::vector<VertexIndex> successor(n, none);
    std::vector<EdgeIndex> picked(movers.size());
    std::vector<std::vector<EdgeIndex>> result;

    auto closes_cycle = [&](VertexIndex v) {
        VertexIndex cur = successor[v];
        for (std::size_t steps = 0; cur != none && !is_root[cur]; ++steps) {
            if (cur == v) return true;
            cur = successor[cur];
            if (steps > n) return true;
        }
        return false;
    };

    auto recurse = [&](auto&& self, std::size_t depth) -> void {
        if (depth == movers.size()) {
            std::vector<EdgeIndex> forest(picked.begin(), picked.end());
            std::sort(forest.begin(), forest.end());
            result.push_back(std::move(forest));
            return;
        }
        const VertexIndex v = movers[depth];
        for (EdgeIndex e : choices[depth]) {
            successor[v] = g.edge(e).target;
            if (!closes_cycle(v)) {
                picked[depth] = e;
                self(self, depth + 1);
            }
            successor[v] = none;
        }
    };
    recurse(recurse, 0);
    return result;
}

/// The spanning arborescences (directed towards `root`) of root's strongly
/// connected component.
template <class T>
std::vector<Arborescence> enumerate_arborescences(const LabeledDigraph<T>& g, VertexIndex root)
{
    if (root >= g.vertex_count())
        throw Error(Errc::root_not_in_graph, "root index " + std::to_string(root) + " is not a vertex");
    const auto& component = g.components()[g.component_of(root)];
    std::vector<Arborescence> out;
    for (auto& edges : enumerate_in_forests(g, component, {root}))
        out.push_back({root, std::move(edges)});
    return out;
}

/// All directed simple cycles, rotated to start at their smallest vertex and
/// sorted lexicographically by vertex sequence.
template <class T>
std::vector<Cycle> enumerate_cycles(const LabeledDigraph<T>& g)
{
    const std::size_t n = g.vertex_count();
    std::vector<Cycle> cycles;
    std::vector<VertexIndex> path;
    std::vector<EdgeIndex> path_edges;
    std::vector<bool> on_path(n, false);

    auto dfs = [&](auto&& self, VertexIndex start, VertexIndex v) -> void {
        for (EdgeIndex e : g.out_edges(v)) {
            const VertexIndex w = g.edge(e).target;
            if (w == start) {
                Cycle c{path, path_edges};
                c.edges.push_back(e);
                cycles.push_back(std::move(c));
            } else if (w > start && !on_path[w]) {
                on_path[w] = true;
                path.push_back(w);
                path_edges.push_back(e);
                self(self, start, w);
                path.pop_back();
                path_edges.pop_back();
                on_path[w] = false;
            }
        }
    };
    for (VertexIndex s = 0; s < n; ++s) {
        path = {s};
        path_edges.clear();
        on_path[s] = true;
        dfs(dfs, s, s);
        on_path[s] = false;
    }
    std::sort(cycles.begin(), cycles.end(),
              [](const Cycle& a, const Cycle& b) { return a.vertices < b.vertices; });
    return cycles;
}

template <class T>
struct IncidenceMatrices {
    Matrix<T> incidence; // -1 at (source, e), +1 at (target, e)
    Matrix<T> source;    // +1 at (source, e)
};

template <class T>
IncidenceMatrices<T> incidence_matrices(const LabeledDigraph<T>& g)
{
    const auto n = static_cast<Index>(g.vertex_count());
    const auto m = static_cast<Index>(g.edge_count());
    IncidenceMatrices<T> out{Matrix<T>::Zero(n, m), Matrix<T>::Zero(n, m)};
    for (Index e = 0; e < m; ++e) {
        const auto& edge = g.edge(static_cast<EdgeIndex>(e));
        out.incidence(static_cast<Index>(edge.source), e) = T(-1);
        out.incidence(static_cast<Index>(edge.target), e) = T(1);
        out.source(static_cast<Index>(edge.source), e) = T(1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Auxiliary trees

enum class AuxKind { chain, star, general };

constexpr std::string_view aux_kind_name(AuxKind kind) noexcept
{
    switch (kind) {
    case AuxKind::chain: return "chain";
    case AuxKind::star: return "star";
    case AuxKind::general: return "general";
    }
    return "general";
}

struct AuxEdge {
    VertexIndex source;
    VertexIndex target;

    friend bool operator==(const AuxEdge&, const AuxEdge&) = default;
};

/// One spanning tree per strongly connected component, over the same vertex
/// set as the host graph. Edges need not belong to the host graph.
struct AuxTree {
    std::vector<AuxEdge> edges;
    AuxKind kind = AuxKind::general;
    std::vector<std::size_t> component; // component index of each edge

    friend bool operator==(const AuxTree&, const AuxTree&) = default;
};

template <class T>
Matrix<T> aux_incidence(const AuxTree& aux, std::size_t vertex_count)
{
    Matrix<T> m = Matrix<T>::Zero(static_cast<Index>(vertex_count), static_cast<Index>(aux.edges.size()));
    for (std::size_t e = 0; e < aux.edges.size(); ++e) {
        m(static_cast<Index>(aux.edges[e].source), static_cast<Index>(e)) = T(-1);
        m(static_cast<Index>(aux.edges[e].target), static_cast<Index>(e)) = T(1);
    }
    return m;
}

struct AuxValidation {
    bool ok = true;
    std::string violation;

    explicit operator bool() const noexcept { return ok; }
};

/// Checks every AuxTree invariant against g's SCC partition and reports the
/// first violation.
template <class T>
AuxValidation validate_aux_tree(const LabeledDigraph<T>& g, const AuxTree& aux)
{
    auto fail = [](std::string why) { return AuxValidation{false, std::move(why)}; };
    const std::size_t n = g.vertex_count();
    const auto& comps = g.components();

    if (aux.component.size() != aux.edges.size())
        return fail("component map has " + std::to_string(aux.component.size()) + " entries for " +
                    std::to_string(aux.edges.size()) + " edges");

    std::vector<std::size_t> per_component(comps.size(), 0);
    for (std::size_t e = 0; e < aux.edges.size(); ++e) {
        const auto [s, t] = aux.edges[e];
        if (s >= n || t >= n) return fail("edge " + std::to_string(e) + " has an endpoint outside the graph");
        if (s == t) return fail("edge " + std::to_string(e) + " is a self-loop");
        if (g.component_of(s) != g.component_of(t))
            return fail("edge " + g.vertex_id(s) + "->" + g.vertex_id(t) + " joins two components");
        if (aux.component[e] != g.component_of(s))
            return fail("edge " + g.vertex_id(s) + "->" + g.vertex_id(t) + " carries a wrong component index");
        ++per_component[g.component_of(s)];
    }
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (per_component[c] != comps[c].size() - 1)
            return fail("component " + std::to_string(c) + " has " + std::to_string(per_component[c]) +
                        " edges, expected |V|-1 = " + std::to_string(comps[c].size() - 1));
    }

    std::vector<VertexIndex> parent(n);
    std::iota(parent.begin(), parent.end(), VertexIndex{0});
    auto find = [&](VertexIndex v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& edge : aux.edges) {
        VertexIndex a = find(edge.source), b = find(edge.target);
        if (a == b)
            return fail("edges form an undirected cycle through " + g.vertex_id(edge.source) + "->" +
                        g.vertex_id(edge.target));
        parent[a] = b;
    }
    // With |V^c|-1 acyclic edges per component, each component is spanned.

    if (aux.kind == AuxKind::chain) {
        std::vector<int> in_deg(n, 0), out_deg(n, 0);
        for (const auto& edge : aux.edges) {
            ++out_deg[edge.source];
            ++in_deg[edge.target];
        }
        for (VertexIndex v = 0; v < n; ++v)
            if (in_deg[v] > 1 || out_deg[v] > 1)
                return fail("vertex " + g.vertex_id(v) + " breaks the chain shape");
    } else if (aux.kind == AuxKind::star) {
        std::vector<std::optional<VertexIndex>> root(comps.size());
        for (std::size_t e = 0; e < aux.edges.size(); ++e) {
            auto& r = root[aux.component[e]];
            if (!r) r = aux.edges[e].target;
            if (*r != aux.edges[e].target)
                return fail("component " + std::to_string(aux.component[e]) + " has edges into two roots");
        }
    }
    return {};
}

template <class T>
void require_valid_aux(const LabeledDigraph<T>& g, const AuxTree& aux)
{
    if (auto report = validate_aux_tree(g, aux); !report)
        throw Error(Errc::invalid_aux_tree, report.violation);
}

/// Chain i1->i2->...->im per component; `orders[c]` must be a permutation of
/// component c (canonical component order).
template <class T>
AuxTree make_chain_tree(const LabeledDigraph<T>& g, const std::vector<std::vector<VertexIndex>>& orders)
{
    const auto& comps = g.components();
    if (orders.size() != comps.size())
        throw Error(Errc::bad_order, "expected one order per component (" + std::to_string(comps.size()) +
                                         "), got " + std::to_string(orders.size()));
    AuxTree aux;
    aux.kind = AuxKind::chain;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        std::vector<VertexIndex> sorted = orders[c];
        std::sort(sorted.begin(), sorted.end());
        if (sorted != comps[c])
            throw Error(Errc::bad_order, "order " + std::to_string(c) + " is not a permutation of component " +
                                             std::to_string(c));
        for (std::size_t i = 0; i + 1 < orders[c].size(); ++i) {
            aux.edges.push_back({orders[c][i], orders[c][i + 1]});
            aux.component.push_back(c);
        }
    }
    return aux;
}

/// Star i->root for every non-root i of each component; `roots[c]` must lie
/// in component c.
template <class T>
AuxTree make_star_tree(const LabeledDigraph<T>& g, const std::vector<VertexIndex>& roots)
{
    const auto& comps = g.components();
    if (roots.size() != comps.size())
        throw Error(Errc::bad_order, "expected one root per component (" + std::to_string(comps.size()) +
                                         "), got " + std::to_string(roots.size()));
    AuxTree aux;
    aux.kind = AuxKind::star;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (roots[c] >= g.vertex_count())
            throw Error(Errc::root_not_in_graph, "root index " + std::to_string(roots[c]) + " is not a vertex");
        if (g.component_of(roots[c]) != c)
            throw Error(Errc::root_outside_component,
                        "root " + g.vertex_id(roots[c]) + " does not lie in component " + std::to_string(c));
        for (VertexIndex v : comps[c]) {
            if (v == roots[c]) continue;
            aux.edges.push_back({v, roots[c]});
            aux.component.push_back(c);
        }
    }
    return aux;
}

/// Arbitrary tree edges; fills the component map and validates.
template <class T>
AuxTree make_general_tree(const LabeledDigraph<T>& g, std::vector<AuxEdge> edges, AuxKind kind = AuxKind::general)
{
    AuxTree aux{std::move(edges), kind, {}};
    for (const auto& e : aux.edges)
        aux.component.push_back(e.source < g.vertex_count() ? g.component_of(e.source) : 0);
    require_valid_aux(g, aux);
    return aux;
}

/// Chain following declaration order inside each component.
template <class T>
AuxTree default_chain_tree(const LabeledDigraph<T>& g)
{
    return make_chain_tree(g, g.components());
}

/// Every chain tree of g (all per-component permutations). Throws
/// DimensionTooLarge when there would be more than `cap` of them.
template <class T>
std::vector<AuxTree> all_chain_trees(const LabeledDigraph<T>& g, std::size_t cap = 100000)
{
    const auto& comps = g.components();
    std::size_t total = 1;
    for (const auto& c : comps) {
        for (std::size_t k = 2; k <= c.size(); ++k) {
            total *= k;
            if (total > cap)
                throw Error(Errc::dimension_too_large, "more than " + std::to_string(cap) + " chain orders");
        }
    }
    std::vector<std::vector<std::vector<VertexIndex>>> per_component;
    for (const auto& c : comps) {
        std::vector<std::vector<VertexIndex>> perms;
        std::vector<VertexIndex> p = c;
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        per_component.push_back(std::move(perms));
    }
    std::vector<AuxTree> out;
    std::vector<std::vector<VertexIndex>> current(comps.size());
    auto recurse = [&](auto&& self, std::size_t c) -> void {
        if (c == comps.size()) {
            out.push_back(make_chain_tree(g, current));
            return;
        }
        for (const auto& p : per_component[c]) {
            current[c] = p;
            self(self, c + 1);
        }
    };
    recurse(recurse, 0);
    return out;
}

/// Vertex sequence of a chain component (follows the edges from the unique
/// vertex without incoming chain edge).
inline std::vector<VertexIndex> chain_sequence(const AuxTree& aux, std::size_t component,
                                               const std::vector<VertexIndex>& vertices)
{
    if (vertices.size() == 1) return vertices;
    std::map<VertexIndex, VertexIndex> next;
    std::map<VertexIndex, int> in_degree;
    for (std::size_t e = 0; e < aux.edges.size(); ++e) {
        if (aux.component[e] != component) continue;
        next[aux.edges[e].source] = aux.edges[e].target;
        ++in_degree[aux.edges[e].target];
    }
    VertexIndex start = vertices.front();
    for (VertexIndex v : vertices)
        if (in_degree[v] == 0) start = v;
    std::vector<VertexIndex> seq{start};
    while (next.count(seq.back()) != 0) seq.push_back(next[seq.back()]);
    return seq;
}

} // namespace crnlap
