#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "crnlap/error.hpp"
#include "crnlap/graph.hpp"
#include "crnlap/laplacian.hpp"
#include "crnlap/linalg.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap {

/// A labeled digraph whose vertices carry complexes (columns of Y, one per
/// vertex, rows indexed by species). Immutable; copies share the lazily
/// computed tree constants.
template <class T>
class ReactionNetwork {
public:
    ReactionNetwork(std::vector<std::string> species, Matrix<T> complexes, LabeledDigraph<T> graph)
        : species_(std::move(species)), y_(std::move(complexes)), graph_(std::move(graph)),
          lazy_(std::make_shared<Lazy>())
    {
        const auto n = static_cast<Index>(species_.size());
        const auto v = static_cast<Index>(graph_.vertex_count());
        if (y_.rows() != n || y_.cols() != v)
            throw Error(Errc::shape_mismatch, "complex matrix is " + std::to_string(y_.rows()) + "x" +
                                                  std::to_string(y_.cols()) + ", expected " + std::to_string(n) +
                                                  "x" + std::to_string(v));
        std::set<std::string> names;
        for (const auto& s : species_)
            if (!names.insert(s).second) throw Error(Errc::invalid_argument, "species '" + s + "' declared twice");

        integer_ = true;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < v; ++j) {
                if (y_(i, j) < T(0))
                    throw Error(Errc::negative_complex_entry, "complex of vertex '" + graph_.vertex_id(static_cast<VertexIndex>(j)) +
                                                                  "' has a negative entry for species '" + species_[static_cast<std::size_t>(i)] + "'");
                if constexpr (is_exact_v<T>)
                    integer_ = integer_ && is_integer(y_(i, j));
                else
                    integer_ = integer_ && std::floor(y_(i, j)) == y_(i, j);
            }
        for (Index a = 0; a < v; ++a)
            for (Index b = a + 1; b < v; ++b)
                if (y_.col(a) == y_.col(b))
                    throw Error(Errc::duplicate_complex, "vertices '" + graph_.vertex_id(static_cast<VertexIndex>(a)) + "' and '" +
                                                             graph_.vertex_id(static_cast<VertexIndex>(b)) + "' share a complex");

        laplacian_ = laplacian_matrix(graph_);
        const auto inc = incidence_matrices(graph_);
        reaction_vectors_ = y_ * inc.incidence;
        s_basis_ = linalg::column_basis(reaction_vectors_);
        Matrix<T> transposed = reaction_vectors_.transpose();
        if (transposed.rows() == 0) transposed = Matrix<T>::Zero(0, n);
        s_perp_basis_ = linalg::nullspace(transposed);
        y_double_ = to_double(y_);
        laplacian_double_ = to_double(laplacian_);
    }

    std::size_t species_count() const noexcept { return species_.size(); }
    const std::vector<std::string>& species() const noexcept { return species_; }
    const LabeledDigraph<T>& graph() const noexcept { return graph_; }
    const Matrix<T>& complexes() const noexcept { return y_; }
    const Matrix<T>& laplacian() const noexcept { return laplacian_; }
    /// Y I_E: one reaction vector y(i') - y(i) per edge.
    const Matrix<T>& reaction_vectors() const noexcept { return reaction_vectors_; }
    const Matrix<T>& s_basis() const noexcept { return s_basis_; }
    const Matrix<T>& s_perp_basis() const noexcept { return s_perp_basis_; }
    bool integer_complexes() const noexcept { return integer_; }
    bool weakly_reversible() const { return graph_.has_strongly_connected_components(); }

    template <class U>
    const Matrix<U>& complexes_as() const
    {
        if constexpr (std::is_same_v<U, T>)
            return y_;
        else
            return y_double_;
    }

    template <class U>
    const Matrix<U>& laplacian_as() const
    {
        if constexpr (std::is_same_v<U, T>)
            return laplacian_;
        else
            return laplacian_double_;
    }

    void require_weakly_reversible() const
    {
        if (!weakly_reversible())
            throw Error(Errc::not_weakly_reversible, "some connected component is not strongly connected");
    }

    /// K_k, computed once (minors backend) and shared by all copies.
    const TreeConstants<T>& tree_constants() const
    {
        require_weakly_reversible();
        std::call_once(lazy_->flag, [this] {
            lazy_->k = crnlap::tree_constants(graph_, TreeBackend::minors);
            lazy_->k_double = to_double(lazy_->k.values);
        });
        return lazy_->k;
    }

    template <class U>
    const Vector<U>& tree_constants_as() const
    {
        tree_constants();
        if constexpr (std::is_same_v<U, T>)
            return lazy_->k.values;
        else
            return lazy_->k_double;
    }

    template <class U>
    ReactionNetwork<U> cast() const
    {
        if constexpr (std::is_same_v<U, T>)
            return *this;
        else
            return ReactionNetwork<U>(species_, to_double(y_), graph_.template cast<U>());
    }

private:
    struct Lazy {
        std::once_flag flag;
        TreeConstants<T> k;
        Vector<double> k_double;
    };

    std::vector<std::string> species_;
    Matrix<T> y_;
    LabeledDigraph<T> graph_;
    Matrix<T> laplacian_;
    Matrix<T> reaction_vectors_;
    Matrix<T> s_basis_;
    Matrix<T> s_perp_basis_;
    Matrix<double> y_double_;
    Matrix<double> laplacian_double_;
    bool integer_ = true;
    std::shared_ptr<Lazy> lazy_;
};

template <class T>
ReactionNetwork<T> build_network(std::vector<std::string> species, Matrix<T> complexes, LabeledDigraph<T> graph)
{
    return ReactionNetwork<T>(std::move(species), std::move(complexes), std::move(graph));
}

/// State scalars accepted by a network over T: T itself, or double.
template <class T, class U>
concept StateScalarFor = std::is_same_v<U, T> || std::is_same_v<U, double>;

template <class U>
void require_positive_state(const Vector<U>& x, std::size_t species_count)
{
    if (static_cast<std::size_t>(x.size()) != species_count)
        throw Error(Errc::shape_mismatch, "state has " + std::to_string(x.size()) + " entries, expected " +
                                              std::to_string(species_count));
    for (Index i = 0; i < x.size(); ++i) {
        bool positive;
        if constexpr (std::is_same_v<U, double>)
            positive = std::isfinite(x(i)) && x(i) > 0.0;
        else
            positive = x(i) > U(0);
        if (!positive)
            throw Error(Errc::non_positive_state, "state entry " + std::to_string(i) + " is not positive");
    }
}

/// (x^Y)_i = prod_j x_j^{Y_{j,i}}.
template <class T, class U>
    requires StateScalarFor<T, U>
Vector<U> monomial_vector(const ReactionNetwork<T>& net, const Vector<U>& x)
{
    require_positive_state(x, net.species_count());
    const Matrix<U>& y = net.template complexes_as<U>();
    Vector<U> out(y.cols());
    for (Index v = 0; v < y.cols(); ++v) {
        U value(1);
        for (Index s = 0; s < y.rows(); ++s) {
            if (is_zero(y(s, v))) continue;
            if constexpr (std::is_same_v<U, double>) {
                value *= std::pow(x(s), y(s, v));
            } else {
                if (!is_integer(y(s, v)))
                    throw Error(Errc::non_integer_exponent, "exact evaluation needs integer complexes");
                value *= integer_power(x(s), numerator_of(y(s, v)));
            }
        }
        out(v) = value;
    }
    return out;
}

/// f_k(x) = Y A_k x^Y.
template <class T, class U>
    requires StateScalarFor<T, U>
Vector<U> mass_action_rhs(const ReactionNetwork<T>& net, const Vector<U>& x)
{
    const Vector<U> mono = monomial_vector(net, x);
    return net.template complexes_as<U>() * (net.template laplacian_as<U>() * mono);
}

template <class U>
struct BinomialForm {
    Vector<U> value;     // -Y I_E core I_E^T diag(K^-1) x^Y
    Vector<U> binomials; // x^{y(i')}/K_{i'} - x^{y(i)}/K_i per aux edge i->i'
};

/// I_E^T diag(K^-1) x^Y for a given aux tree.
template <class T, class U>
    requires StateScalarFor<T, U>
Vector<U> binomial_vector(const ReactionNetwork<T>& net, const AuxTree& aux, const Vector<U>& x)
{
    const Vector<U>& k = net.template tree_constants_as<U>();
    const Vector<U> mono = monomial_vector(net, x);
    Vector<U> b(static_cast<Index>(aux.edges.size()));
    for (std::size_t e = 0; e < aux.edges.size(); ++e) {
        const auto s = static_cast<Index>(aux.edges[e].source);
        const auto t = static_cast<Index>(aux.edges[e].target);
        b(static_cast<Index>(e)) = mono(t) / k(t) - mono(s) / k(s);
    }
    return b;
}

template <class T, class U>
    requires StateScalarFor<T, U>
BinomialForm<U> binomial_rhs(const ReactionNetwork<T>& net, const CoreDecomposition<T>& d, const Vector<U>& x)
{
    net.require_weakly_reversible();
    BinomialForm<U> out;
    out.binomials = binomial_vector(net, d.aux, x);
    Matrix<U> core;
    if constexpr (std::is_same_v<U, T>)
        core = d.core;
    else
        core = to_double(d.core);
    const Matrix<U> inc = aux_incidence<U>(d.aux, net.graph().vertex_count());
    out.value = -(net.template complexes_as<U>() * (inc * (core * out.binomials)));
    return out;
}

template <class T, class U>
    requires StateScalarFor<T, U>
BinomialForm<U> binomial_rhs(const ReactionNetwork<T>& net, const AuxTree& aux, const Vector<U>& x)
{
    net.require_weakly_reversible();
    require_valid_aux(net.graph(), aux);
    return binomial_rhs(net, core_matrix(net.graph(), aux), x);
}

template <class T>
struct StoichiometricSubspace {
    Matrix<T> s_basis;
    Matrix<T> s_perp_basis;
};

template <class T>
StoichiometricSubspace<T> stoichiometric_subspace(const ReactionNetwork<T>& net)
{
    return {net.s_basis(), net.s_perp_basis()};
}

/// Exact membership of v in S (rank test) for rational networks; float
/// networks use a residual test against the S basis.
template <class T>
bool in_stoichiometric_subspace(const ReactionNetwork<T>& net, const Vector<T>& v)
{
    const Matrix<T>& perp = net.s_perp_basis();
    const Vector<T> proj = perp.transpose() * v;
    if constexpr (is_exact_v<T>)
        return max_abs(proj) == 0.0 && (proj.array() == T(0)).all();
    else
        return max_abs(proj) <= 1e-10 * std::max(1.0, max_abs(v)) * std::max(1.0, max_abs(perp));
}

} // namespace crnlap
