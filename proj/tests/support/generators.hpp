#pragma once

// Seeded random instances for property tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "crnlap/crnlap.hpp"
#include "oracles.hpp"

namespace gen {

using crnlap::AuxEdge;
using crnlap::AuxTree;
using crnlap::Index;
using crnlap::LabeledDigraph;
using crnlap::Matrix;
using crnlap::Rational;
using crnlap::ReactionNetwork;
using crnlap::Vector;
using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// p/q with 1 <= p, q <= 9.
inline Rational small_rational(Rng& rng) { return Rational(uniform_int(rng, 1, 9), uniform_int(rng, 1, 9)); }

struct GraphSpec {
    std::size_t vertices = 0;
    std::vector<oracle::Arc<Rational>> arcs;
};

/// Vertices split into random blocks; each block gets a random Hamiltonian
/// cycle (so it is strongly connected) plus extra internal edges.
inline GraphSpec random_sc_spec(Rng& rng, std::size_t n, double extra_probability = 0.35, bool allow_singletons = true)
{
    GraphSpec spec;
    spec.vertices = n;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<std::size_t>> blocks;
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t size = static_cast<std::size_t>(uniform_int(rng, allow_singletons ? 1 : 2, static_cast<int>(n)));
        size = std::min(size, n - pos);
        if (!allow_singletons && n - pos - size == 1) size += 1;
        blocks.emplace_back(perm.begin() + static_cast<long>(pos), perm.begin() + static_cast<long>(pos + size));
        pos += size;
    }
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (const auto& b : blocks) {
        if (b.size() < 2) continue;
        for (std::size_t i = 0; i < b.size(); ++i) used.emplace(b[i], b[(i + 1) % b.size()]);
        for (std::size_t s : b)
            for (std::size_t t : b)
                if (s != t && !used.count({s, t}) && uniform_real(rng, 0, 1) < extra_probability) used.emplace(s, t);
    }
    std::vector<std::pair<std::size_t, std::size_t>> arcs(used.begin(), used.end());
    std::shuffle(arcs.begin(), arcs.end(), rng);
    for (auto [s, t] : arcs) spec.arcs.push_back({s, t, small_rational(rng)});
    return spec;
}

inline LabeledDigraph<Rational> to_graph(const GraphSpec& spec)
{
    std::vector<crnlap::EdgeSpec<Rational>> edges;
    for (const auto& a : spec.arcs) edges.push_back({std::to_string(a.s + 1), std::to_string(a.t + 1), a.k});
    return crnlap::build_digraph(crnlap::numbered_vertices(spec.vertices), edges);
}

inline std::vector<oracle::Arc<double>> to_double_arcs(const std::vector<oracle::Arc<Rational>>& arcs)
{
    std::vector<oracle::Arc<double>> out;
    for (const auto& a : arcs) out.push_back({a.s, a.t, crnlap::to_double(a.k)});
    return out;
}

template <class T>
std::vector<oracle::Arc<T>> arcs_of(const LabeledDigraph<T>& g)
{
    std::vector<oracle::Arc<T>> out;
    for (const auto& e : g.edges()) out.push_back({e.source, e.target, e.label});
    return out;
}

/// Random spanning tree per component with random edge directions.
template <class T>
AuxTree random_general_tree(Rng& rng, const LabeledDigraph<T>& g)
{
    std::vector<AuxEdge> edges;
    for (auto comp : g.components()) {
        std::shuffle(comp.begin(), comp.end(), rng);
        for (std::size_t i = 1; i < comp.size(); ++i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i) - 1));
            if (uniform_int(rng, 0, 1) == 0)
                edges.push_back({comp[i], comp[j]});
            else
                edges.push_back({comp[j], comp[i]});
        }
    }
    return crnlap::make_general_tree(g, edges);
}

/// n distinct integer complexes with entries in [0, max_entry].
inline Matrix<Rational> random_complexes(Rng& rng, std::size_t species, std::size_t vertices, int max_entry = 3)
{
    Matrix<Rational> y(static_cast<Index>(species), static_cast<Index>(vertices));
    std::set<std::vector<int>> seen;
    for (std::size_t v = 0; v < vertices; ++v) {
        std::vector<int> col;
        do {
            col.clear();
            for (std::size_t s = 0; s < species; ++s) col.push_back(uniform_int(rng, 0, max_entry));
        } while (seen.count(col));
        seen.insert(col);
        for (std::size_t s = 0; s < species; ++s) y(static_cast<Index>(s), static_cast<Index>(v)) = col[s];
    }
    return y;
}

inline std::vector<std::string> species_names(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back("X" + std::to_string(i));
    return out;
}

/// Random weakly reversible network with n species and |V| vertices.
inline ReactionNetwork<Rational> random_wr_network(Rng& rng, std::size_t species, std::size_t vertices)
{
    const std::size_t max_entry = species == 1 ? std::max<std::size_t>(3, vertices) : 3;
    auto y = random_complexes(rng, species, vertices, static_cast<int>(max_entry));
    return crnlap::build_network(species_names(species), y, to_graph(random_sc_spec(rng, vertices)));
}

struct Planted {
    ReactionNetwork<Rational> network;
    Vector<Rational> x_star;
};

/// Labels k_e = w_e / x*^{y(source)} for a positive circulation w, which
/// makes x* an exact complex-balanced equilibrium.
inline Planted planted_cbe_network(Rng& rng, std::size_t species, std::size_t vertices, bool allow_singletons = true)
{
    const std::size_t max_entry = species == 1 ? std::max<std::size_t>(3, vertices) : 3;
    auto y = random_complexes(rng, species, vertices, static_cast<int>(max_entry));
    const auto shape = to_graph(random_sc_spec(rng, vertices, 0.35, allow_singletons));

    Vector<Rational> x_star(static_cast<Index>(species));
    for (Index i = 0; i < x_star.size(); ++i) x_star(i) = Rational(uniform_int(rng, 1, 6), uniform_int(rng, 1, 4));
    Vector<Rational> psi(static_cast<Index>(vertices));
    for (Index v = 0; v < psi.size(); ++v) {
        Rational p(1);
        for (Index s = 0; s < x_star.size(); ++s)
            p *= crnlap::integer_power(x_star(s), crnlap::numerator_of(y(s, v)));
        psi(v) = p;
    }
    std::vector<Rational> w(shape.edge_count(), Rational(0));
    for (const auto& c : crnlap::enumerate_cycles(shape)) {
        const Rational coeff(uniform_int(rng, 1, 9));
        for (auto e : c.edges) w[e] += coeff;
    }
    std::vector<crnlap::EdgeSpec<Rational>> edges;
    for (std::size_t e = 0; e < shape.edge_count(); ++e) {
        const auto& edge = shape.edge(e);
        edges.push_back({shape.vertex_id(edge.source), shape.vertex_id(edge.target),
                         Rational(w[e] / psi(static_cast<Index>(edge.source)))});
    }
    auto g = crnlap::build_digraph(shape.vertex_ids(), edges);
    return {crnlap::build_network(species_names(species), y, std::move(g)), x_star};
}

/// Positive state with log-uniform entries in [e^-lo, e^hi].
inline Vector<double> random_state(Rng& rng, std::size_t n, double spread = 1.5)
{
    Vector<double> x(static_cast<Index>(n));
    for (Index i = 0; i < x.size(); ++i) x(i) = std::exp(uniform_real(rng, -spread, spread));
    return x;
}

/// Positive rational state p/q with 1 <= p <= 9, 1 <= q <= 4.
inline Vector<Rational> random_rational_state(Rng& rng, std::size_t n)
{
    Vector<Rational> x(static_cast<Index>(n));
    for (Index i = 0; i < x.size(); ++i) x(i) = Rational(uniform_int(rng, 1, 9), uniform_int(rng, 1, 4));
    return x;
}

} // namespace gen
