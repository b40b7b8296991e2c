#pragma once

#include <string>
#include <vector>

#include "crnlap/error.hpp"
#include "crnlap/graph.hpp"
#include "crnlap/linalg.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap {

/// A_k: off-diagonal (i, j) = k_{j->i}, diagonal = -(outgoing label sum).
template <class T>
Matrix<T> laplacian_matrix(const LabeledDigraph<T>& g)
{
    const auto n = static_cast<Index>(g.vertex_count());
    Matrix<T> a = Matrix<T>::Zero(n, n);
    for (const auto& e : g.edges()) {
        const auto s = static_cast<Index>(e.source);
        const auto t = static_cast<Index>(e.target);
        a(t, s) += e.label;
        a(s, s) -= e.label;
    }
    return a;
}

enum class TreeBackend { enumeration, minors };

constexpr std::string_view backend_name(TreeBackend b) noexcept
{
    return b == TreeBackend::enumeration ? "enumeration" : "minors";
}

template <class T>
struct TreeConstants {
    Vector<T> values;
    TreeBackend backend = TreeBackend::enumeration;
};

template <class T>
T edge_product(const LabeledDigraph<T>& g, const std::vector<EdgeIndex>& edges)
{
    T product(1);
    for (EdgeIndex e : edges) product *= g.edge(e).label;
    return product;
}

template <class T>
TreeConstants<T> tree_constants(const LabeledDigraph<T>& g, TreeBackend backend = TreeBackend::minors)
{
    require_strongly_connected_components(g);
    const auto n = static_cast<Index>(g.vertex_count());
    TreeConstants<T> out{Vector<T>::Zero(n), backend};

    if (backend == TreeBackend::enumeration) {
        for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
            T sum(0);
            for (const auto& tree : enumerate_arborescences(g, v)) sum += edge_product(g, tree.edges);
            out.values(static_cast<Index>(v)) = sum;
        }
        return out;
    }

    const Matrix<T> a = laplacian_matrix(g);
    for (const auto& comp : g.components()) {
        const auto m = static_cast<Index>(comp.size());
        if (m == 1) {
            out.values(static_cast<Index>(comp[0])) = T(1);
            continue;
        }
        // (K_k)_i is the principal minor of -A_k (component block) without row/column i.
        for (Index skip = 0; skip < m; ++skip) {
            Matrix<T> minor(m - 1, m - 1);
            for (Index r = 0, rr = 0; r < m; ++r) {
                if (r == skip) continue;
                for (Index c = 0, cc = 0; c < m; ++c) {
                    if (c == skip) continue;
                    minor(rr, cc) = -a(static_cast<Index>(comp[static_cast<std::size_t>(r)]),
                                       static_cast<Index>(comp[static_cast<std::size_t>(c)]));
                    ++cc;
                }
                ++rr;
            }
            out.values(static_cast<Index>(comp[static_cast<std::size_t>(skip)])) = linalg::determinant(minor);
        }
    }
    return out;
}

enum class LeftInverseChoice { kind_specific, generic };

template <class T>
struct CoreDecomposition {
    AuxTree aux;
    Matrix<T> core;
    Matrix<T> laplacian;
    TreeConstants<T> tree_constants;
    T residual = T(0);
};

/// A_k diag(K_k).
template <class T>
Matrix<T> balanced_laplacian(const Matrix<T>& laplacian, const Vector<T>& tree_constants)
{
    return laplacian * tree_constants.asDiagonal();
}

/// J with J I_E = -Id (chain) or +Id (star), block-structured per component.
template <class T>
Matrix<T> kind_left_inverse(const LabeledDigraph<T>& g, const AuxTree& aux)
{
    const auto m = static_cast<Index>(aux.edges.size());
    Matrix<T> j = Matrix<T>::Zero(m, static_cast<Index>(g.vertex_count()));
    if (aux.kind == AuxKind::chain) {
        for (std::size_t c = 0; c < g.components().size(); ++c) {
            const auto seq = chain_sequence(aux, c, g.components()[c]);
            std::vector<std::size_t> position(g.vertex_count(), 0);
            for (std::size_t p = 0; p < seq.size(); ++p) position[seq[p]] = p;
            for (std::size_t e = 0; e < aux.edges.size(); ++e) {
                if (aux.component[e] != c) continue;
                for (VertexIndex v : seq)
                    if (position[v] <= position[aux.edges[e].source])
                        j(static_cast<Index>(e), static_cast<Index>(v)) = T(1);
            }
        }
    } else if (aux.kind == AuxKind::star) {
        for (std::size_t e = 0; e < aux.edges.size(); ++e)
            for (VertexIndex v : g.components()[aux.component[e]])
                if (v != aux.edges[e].source) j(static_cast<Index>(e), static_cast<Index>(v)) = T(1);
    } else {
        j = linalg::left_inverse(aux_incidence<T>(aux, g.vertex_count()));
    }
    return j;
}

template <class T>
T decomposition_residual(const Matrix<T>& balanced, const Matrix<T>& incidence, const Matrix<T>& core)
{
    const Matrix<T> r = balanced + incidence * core * incidence.transpose();
    T worst(0);
    for (Index i = 0; i < r.rows(); ++i)
        for (Index j = 0; j < r.cols(); ++j) worst = std::max(worst, abs_value(T(r(i, j))));
    return worst;
}

/// The unique core matrix with A_k diag(K_k) = -I_E core I_E^T.
template <class T>
CoreDecomposition<T> core_matrix(const LabeledDigraph<T>& g, const AuxTree& aux,
                                 LeftInverseChoice choice = LeftInverseChoice::kind_specific,
                                 TreeBackend backend = TreeBackend::minors)
{
    require_strongly_connected_components(g);
    require_valid_aux(g, aux);

    CoreDecomposition<T> d;
    d.aux = aux;
    d.laplacian = laplacian_matrix(g);
    d.tree_constants = tree_constants(g, backend);
    const Matrix<T> b = balanced_laplacian(d.laplacian, d.tree_constants.values);

    Matrix<T> j;
    if (choice == LeftInverseChoice::generic)
        j = linalg::left_inverse(aux_incidence<T>(aux, g.vertex_count()));
    else
        j = kind_left_inverse(g, aux);
    d.core = -(j * b * j.transpose());
    if constexpr (!is_exact_v<T>) {
        // Entries outside the component blocks are zero by construction.
        for (Index r = 0; r < d.core.rows(); ++r)
            for (Index c = 0; c < d.core.cols(); ++c)
                if (aux.component[static_cast<std::size_t>(r)] != aux.component[static_cast<std::size_t>(c)])
                    d.core(r, c) = 0.0;
    }
    d.residual = decomposition_residual(b, aux_incidence<T>(aux, g.vertex_count()), d.core);
    return d;
}

/// Laplacian of a cycle with unit labels.
template <class T>
Matrix<T> cycle_laplacian(const LabeledDigraph<T>& g, const Cycle& cycle)
{
    const auto n = static_cast<Index>(g.vertex_count());
    Matrix<T> a = Matrix<T>::Zero(n, n);
    for (EdgeIndex e : cycle.edges) {
        const auto s = static_cast<Index>(g.edge(e).source);
        const auto t = static_cast<Index>(g.edge(e).target);
        a(t, s) += T(1);
        a(s, s) -= T(1);
    }
    return a;
}

template <class T>
struct CycleTerm {
    Cycle cycle;
    T coefficient;
};

template <class T>
struct CycleDecomposition {
    std::vector<CycleTerm<T>> terms;
};

/// lambda_C = (product of C's labels) x (sum over in-forests of C's component
/// rooted at C's vertices of their label products).
template <class T>
CycleDecomposition<T> cycle_decomposition(const LabeledDigraph<T>& g)
{
    require_strongly_connected_components(g);
    CycleDecomposition<T> out;
    for (auto& cycle : enumerate_cycles(g)) {
        const auto& comp = g.components()[g.component_of(cycle.vertices.front())];
        T forests(0);
        for (const auto& f : enumerate_in_forests(g, comp, cycle.vertices)) forests += edge_product(g, f);
        T lambda = edge_product(g, cycle.edges) * forests;
        out.terms.push_back({std::move(cycle), lambda});
    }
    return out;
}

template <class T>
Matrix<T> reconstruct(const LabeledDigraph<T>& g, const CycleDecomposition<T>& d)
{
    const auto n = static_cast<Index>(g.vertex_count());
    Matrix<T> sum = Matrix<T>::Zero(n, n);
    for (const auto& term : d.terms) sum += term.coefficient * cycle_laplacian(g, term.cycle);
    return sum;
}

struct Check {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct CoreReport {
    std::vector<Check> checks;

    bool passed() const
    {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Recomputes the residual from the stored pieces and checks the sign
/// structure expected for the aux kind.
template <class T>
CoreReport verify_core_decomposition(const CoreDecomposition<T>& d, double rel_tol = 1e-12)
{
    CoreReport report;
    const std::size_t n = static_cast<std::size_t>(d.laplacian.rows());
    const Matrix<T> b = balanced_laplacian(d.laplacian, d.tree_constants.values);
    const Matrix<T> inc = aux_incidence<T>(d.aux, n);
    const T residual = decomposition_residual(b, inc, d.core);
    const double tol = is_exact_v<T> ? 0.0 : rel_tol * std::max(1.0, max_abs(b));

    Check res{"residual", true, {}};
    if constexpr (is_exact_v<T>)
        res.passed = residual == 0;
    else
        res.passed = residual <= tol;
    res.detail = "max |A diag(K) + I core I^T| = " + std::to_string(to_double(residual));
    report.checks.push_back(res);

    Check inv{"invertible", true, {}};
    const Index m = d.core.rows();
    if constexpr (is_exact_v<T>)
        inv.passed = linalg::determinant(d.core) != 0;
    else
        inv.passed = linalg::rank(d.core) == m;
    report.checks.push_back(inv);

    auto entry = [&](Index r, Index c) { return to_double(d.core(r, c)); };
    auto at_least = [&](const T& v, const T& bound) {
        if constexpr (is_exact_v<T>)
            return v >= bound;
        else
            return v >= bound - tol;
    };
    auto positive = [&](const T& v) {
        if constexpr (is_exact_v<T>)
            return v > 0;
        else
            return v > tol;
    };

    if (d.aux.kind == AuxKind::chain) {
        Check sign{"chain_nonnegative_positive_diagonal", true, {}};
        for (Index r = 0; r < m && sign.passed; ++r)
            for (Index c = 0; c < m; ++c) {
                if (!at_least(d.core(r, c), T(0)) || (r == c && !positive(d.core(r, c)))) {
                    sign.passed = false;
                    sign.detail = "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                  ") = " + std::to_string(entry(r, c));
                    break;
                }
            }
        report.checks.push_back(sign);
    } else if (d.aux.kind == AuxKind::star) {
        Check sign{"star_sign_pattern", true, {}};
        Check dom{"star_diagonal_dominance", true, {}};
        for (Index r = 0; r < m; ++r) {
            if (!positive(d.core(r, r))) {
                sign.passed = false;
                sign.detail = "diagonal " + std::to_string(r) + " not positive";
            }
            T row_off(0), col_off(0);
            for (Index c = 0; c < m; ++c) {
                if (c == r) continue;
                if (!at_least(T(-d.core(r, c)), T(0))) {
                    sign.passed = false;
                    sign.detail = "off-diagonal (" + std::to_string(r) + "," + std::to_string(c) + ") positive";
                }
                row_off += abs_value(T(d.core(r, c)));
                col_off += abs_value(T(d.core(c, r)));
            }
            if (!at_least(d.core(r, r), row_off) || !at_least(d.core(r, r), col_off)) {
                dom.passed = false;
                dom.detail = "row/column " + std::to_string(r) + " not dominated by its diagonal";
            }
        }
        report.checks.push_back(sign);
        report.checks.push_back(dom);
    }
    return report;
}

} // namespace crnlap
