#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "crnlap/error.hpp"
#include "crnlap/graph.hpp"
#include "crnlap/linalg.hpp"
#include "crnlap/network.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap {

/// x^{y(i)} / (K_k)_i per vertex.
template <class T, class U>
    requires StateScalarFor<T, U>
Vector<U> scaled_monomials(const ReactionNetwork<T>& net, const Vector<U>& x)
{
    net.require_weakly_reversible();
    const Vector<U> mono = monomial_vector(net, x);
    const Vector<U>& k = net.template tree_constants_as<U>();
    return mono.cwiseQuotient(k);
}

/// Chain tree sorting each component ascending by x^{y(i)}/K_i; ties keep
/// vertex declaration order.
template <class T, class U>
    requires StateScalarFor<T, U>
AuxTree monomial_order(const ReactionNetwork<T>& net, const Vector<U>& x)
{
    const Vector<U> values = scaled_monomials(net, x);
    std::vector<std::vector<VertexIndex>> orders;
    for (auto comp : net.graph().components()) {
        std::stable_sort(comp.begin(), comp.end(), [&](VertexIndex a, VertexIndex b) {
            return values(static_cast<Index>(a)) < values(static_cast<Index>(b));
        });
        orders.push_back(std::move(comp));
    }
    return make_chain_tree(net.graph(), orders);
}

/// All chain trees consistent with the monomial order at x, ties expanded
/// into every permutation. Float values tie when they agree to `rel_tol`.
/// Returns nullopt when more than `cap` orders would result.
template <class T, class U>
    requires StateScalarFor<T, U>
std::optional<std::vector<AuxTree>> admissible_chain_orders(const ReactionNetwork<T>& net, const Vector<U>& x,
                                                            std::size_t cap = 64, double rel_tol = 1e-12)
{
    const Vector<U> values = scaled_monomials(net, x);
    auto ties = [&](VertexIndex a, VertexIndex b) {
        const U& va = values(static_cast<Index>(a));
        const U& vb = values(static_cast<Index>(b));
        if constexpr (is_exact_v<U>)
            return va == vb;
        else
            return std::abs(va - vb) <= rel_tol * std::max(std::abs(va), std::abs(vb));
    };

    std::vector<std::vector<std::vector<VertexIndex>>> per_component;
    std::size_t total = 1;
    for (auto comp : net.graph().components()) {
        std::stable_sort(comp.begin(), comp.end(), [&](VertexIndex a, VertexIndex b) {
            return values(static_cast<Index>(a)) < values(static_cast<Index>(b));
        });
        std::vector<std::vector<VertexIndex>> groups;
        for (VertexIndex v : comp) {
            if (!groups.empty() && ties(groups.back().back(), v))
                groups.back().push_back(v);
            else
                groups.push_back({v});
        }
        std::vector<std::vector<VertexIndex>> orders{{}};
        for (auto& group : groups) {
            std::sort(group.begin(), group.end());
            std::vector<std::vector<VertexIndex>> extended;
            do {
                for (const auto& prefix : orders) {
                    auto o = prefix;
                    o.insert(o.end(), group.begin(), group.end());
                    extended.push_back(std::move(o));
                }
                if (extended.size() > cap) return std::nullopt;
            } while (std::next_permutation(group.begin(), group.end()));
            orders = std::move(extended);
        }
        total *= orders.size();
        if (total > cap) return std::nullopt;
        per_component.push_back(std::move(orders));
    }

    std::vector<AuxTree> out;
    std::vector<std::vector<VertexIndex>> current(per_component.size());
    auto recurse = [&](auto&& self, std::size_t c) -> void {
        if (c == per_component.size()) {
            out.push_back(make_chain_tree(net.graph(), current));
            return;
        }
        for (const auto& o : per_component[c]) {
            current[c] = o;
            self(self, c + 1);
        }
    };
    recurse(recurse, 0);
    return out;
}

/// I_E^T diag(K^-1) x^Y >= 0 (>= -rel_tol * max scaled monomial for floats).
template <class T, class U>
    requires StateScalarFor<T, U>
bool stratum_contains(const ReactionNetwork<T>& net, const AuxTree& aux, const Vector<U>& x, double rel_tol = 1e-12)
{
    require_valid_aux(net.graph(), aux);
    const Vector<U> b = binomial_vector(net, aux, x);
    if constexpr (is_exact_v<U>) {
        return (b.array() >= U(0)).all();
    } else {
        const double scale = scaled_monomials(net, x).cwiseAbs().maxCoeff();
        return b.size() == 0 || b.minCoeff() >= -rel_tol * scale;
    }
}

enum class RegionMode { cone, polyhedron };

namespace detail {

/// Extreme rays of the pointed cone { w : G w >= 0 } with rank(G) = cols(G)
/// (double description, combinatorial adjacency test).
template <class T>
std::vector<Vector<T>> pointed_cone_rays(const Matrix<T>& g)
{
    const Index m = g.rows();
    const Index d = g.cols();
    if (d == 0) return {};

    const auto independent = linalg::rref(Matrix<T>(g.transpose())).pivots;
    if (static_cast<Index>(independent.size()) != d)
        throw Error(Errc::invalid_argument, "constraint matrix of a pointed cone must have full column rank");

    const double tol = linalg::default_tolerance(g);
    auto sign_of = [&](const T& v, double scale) -> int {
        if constexpr (is_exact_v<T>) {
            return v > 0 ? 1 : (v < 0 ? -1 : 0);
        } else {
            const double t = std::max(tol, 1e-12 * scale);
            return v > t ? 1 : (v < -t ? -1 : 0);
        }
    };
    auto normalize = [](Vector<T>& w) {
        if constexpr (!is_exact_v<T>) {
            const double s = w.cwiseAbs().maxCoeff();
            if (s > 0) w /= s;
        }
    };

    struct Ray {
        Vector<T> w;
        std::vector<char> zero; // tight constraints among those processed
    };

    Matrix<T> base(d, d);
    for (Index r = 0; r < d; ++r) base.row(r) = g.row(independent[static_cast<std::size_t>(r)]);
    const Matrix<T> inv = linalg::inverse(base);
    std::vector<char> processed(static_cast<std::size_t>(m), 0);
    for (Index p : independent) processed[static_cast<std::size_t>(p)] = 1;

    std::vector<Ray> rays;
    for (Index c = 0; c < d; ++c) {
        Ray ray{inv.col(c), std::vector<char>(static_cast<std::size_t>(m), 0)};
        normalize(ray.w);
        for (Index r = 0; r < d; ++r)
            if (r != c) ray.zero[static_cast<std::size_t>(independent[static_cast<std::size_t>(r)])] = 1;
        rays.push_back(std::move(ray));
    }

    for (Index j = 0; j < m; ++j) {
        if (processed[static_cast<std::size_t>(j)]) continue;
        const double row_scale = max_abs(Vector<T>(g.row(j).transpose()));
        std::vector<T> value(rays.size());
        std::vector<int> sign(rays.size());
        for (std::size_t r = 0; r < rays.size(); ++r) {
            value[r] = g.row(j).dot(rays[r].w);
            sign[r] = sign_of(value[r], row_scale * max_abs(rays[r].w));
        }

        std::vector<Ray> next;
        for (std::size_t r = 0; r < rays.size(); ++r) {
            if (sign[r] < 0) continue;
            Ray kept = rays[r];
            if (sign[r] == 0) kept.zero[static_cast<std::size_t>(j)] = 1;
            next.push_back(std::move(kept));
        }
        for (std::size_t p = 0; p < rays.size(); ++p) {
            if (sign[p] <= 0) continue;
            for (std::size_t q = 0; q < rays.size(); ++q) {
                if (sign[q] >= 0) continue;
                std::vector<char> common(static_cast<std::size_t>(m), 0);
                Index count = 0;
                for (Index i = 0; i < m; ++i) {
                    const auto ui = static_cast<std::size_t>(i);
                    common[ui] = static_cast<char>(rays[p].zero[ui] && rays[q].zero[ui]);
                    count += common[ui];
                }
                if (count < d - 2) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
                    if (r == p || r == q) continue;
                    bool covers = true;
                    for (Index i = 0; i < m && covers; ++i)
                        if (common[static_cast<std::size_t>(i)] && !rays[r].zero[static_cast<std::size_t>(i)]) covers = false;
                    if (covers) adjacent = false;
                }
                if (!adjacent) continue;
                Ray ray{Vector<T>(value[p] * rays[q].w - value[q] * rays[p].w), common};
                normalize(ray.w);
                ray.zero[static_cast<std::size_t>(j)] = 1;
                next.push_back(std::move(ray));
            }
        }
        processed[static_cast<std::size_t>(j)] = 1;
        rays = std::move(next);
    }

    std::vector<Vector<T>> out;
    for (auto& r : rays) out.push_back(std::move(r.w));
    return out;
}

/// Primitive integer vector for rationals, unit max-norm for floats.
template <class T>
Vector<T> canonical_direction(const Vector<T>& v)
{
    Vector<T> out = v;
    if constexpr (is_exact_v<T>) {
        BigInt lcm = 1;
        for (Index i = 0; i < v.size(); ++i) {
            const BigInt den = denominator_of(v(i));
            lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
        }
        BigInt g = 0;
        for (Index i = 0; i < v.size(); ++i) {
            out(i) = v(i) * Rational(lcm);
            g = boost::multiprecision::gcd(g, numerator_of(out(i)));
        }
        if (g != 0)
            for (Index i = 0; i < v.size(); ++i) out(i) /= Rational(g);
    } else {
        const double s = v.cwiseAbs().maxCoeff();
        if (s > 0) out /= s;
    }
    return out;
}

template <class T>
bool lexicographic_less(const Vector<T>& a, const Vector<T>& b)
{
    for (Index i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a(i) < b(i)) return true;
        if (b(i) < a(i)) return false;
    }
    return a.size() < b.size();
}

} // namespace detail

/// Constraint system (Y I_E)^T z >= offsets in log coordinates. Cone mode
/// has zero offsets; polyhedron mode uses I_E^T ln K_k, shifted by
/// (Y I_E)^T ln x* when a reference point is given.
template <class T>
class ConeDescription {
public:
    ConeDescription(AuxTree aux, RegionMode mode, Matrix<T> normals, Vector<double> offsets)
        : aux_(std::move(aux)), mode_(mode), normals_(std::move(normals)), offsets_(std::move(offsets)),
          cache_(std::make_shared<Cache>())
    {
        Matrix<T> t = normals_.transpose();
        if (t.rows() == 0) t = Matrix<T>::Zero(0, normals_.rows());
        lineality_ = linalg::nullspace(t);
    }

    const AuxTree& aux() const noexcept { return aux_; }
    RegionMode mode() const noexcept { return mode_; }
    Index dimension() const noexcept { return normals_.rows(); }
    /// Columns are the inward facet normals y(i') - y(i).
    const Matrix<T>& facet_normals() const noexcept { return normals_; }
    const Vector<double>& offsets() const noexcept { return offsets_; }
    /// Basis (columns) of ker (Y I_E)^T.
    const Matrix<T>& lineality_basis() const noexcept { return lineality_; }

    /// Extreme rays of the cone {z : (Y I_E)^T z >= 0} intersected with the
    /// orthogonal complement of the lineality space; computed once.
    const std::vector<Vector<T>>& extreme_rays() const
    {
        if (dimension() > 10)
            throw Error(Errc::dimension_too_large,
                        "ray enumeration is limited to 10 species, got " + std::to_string(dimension()));
        std::call_once(cache_->flag, [this] { cache_->rays = compute_rays(); });
        return cache_->rays;
    }

    /// Membership of a log-coordinate point.
    bool contains(const Vector<double>& z, double rel_tol = 1e-10) const
    {
        const Matrix<double> n = to_double(normals_);
        const Vector<double> lhs = n.transpose() * z;
        for (Index e = 0; e < lhs.size(); ++e) {
            const double scale = std::max({1.0, std::abs(lhs(e)), std::abs(offsets_(e))});
            if (lhs(e) < offsets_(e) - rel_tol * scale) return false;
        }
        return true;
    }

private:
    std::vector<Vector<T>> compute_rays() const
    {
        const Matrix<T> basis = linalg::column_basis(normals_);
        const Matrix<T> g = normals_.transpose() * basis;
        std::vector<Vector<T>> rays;
        for (const auto& w : detail::pointed_cone_rays(g)) {
            Vector<T> z = detail::canonical_direction(Vector<T>(basis * w));
            const Vector<T> check = normals_.transpose() * z;
            for (Index e = 0; e < check.size(); ++e) {
                bool ok;
                if constexpr (is_exact_v<T>)
                    ok = check(e) >= 0;
                else
                    ok = check(e) >= -1e-9 * std::max(1.0, max_abs(normals_));
                if (!ok) throw Error(Errc::invalid_argument, "ray enumeration produced an infeasible ray");
            }
            rays.push_back(std::move(z));
        }
        std::sort(rays.begin(), rays.end(), detail::lexicographic_less<T>);
        return rays;
    }

    struct Cache {
        std::once_flag flag;
        std::vector<Vector<T>> rays;
    };

    AuxTree aux_;
    RegionMode mode_;
    Matrix<T> normals_;
    Vector<double> offsets_;
    Matrix<T> lineality_;
    std::shared_ptr<Cache> cache_;
};

template <class T>
ConeDescription<T> region_constraints(const ReactionNetwork<T>& net, const AuxTree& aux,
                                      RegionMode mode = RegionMode::cone,
                                      const std::optional<Vector<double>>& x_star = std::nullopt)
{
    net.require_weakly_reversible();
    require_valid_aux(net.graph(), aux);
    if (mode == RegionMode::cone && x_star)
        throw Error(Errc::invalid_argument, "cones do not depend on a reference point");

    const Matrix<T> inc = aux_incidence<T>(aux, net.graph().vertex_count());
    Matrix<T> normals = net.complexes() * inc;
    Vector<double> offsets = Vector<double>::Zero(static_cast<Index>(aux.edges.size()));
    if (mode == RegionMode::polyhedron) {
        const Vector<double> log_k = net.template tree_constants_as<double>().array().log().matrix();
        offsets = to_double(inc).transpose() * log_k;
        if (x_star) {
            require_positive_state(*x_star, net.species_count());
            offsets -= to_double(normals).transpose() * x_star->array().log().matrix();
        }
    }
    return ConeDescription<T>(aux, mode, std::move(normals), std::move(offsets));
}

/// The cone equals its lineality space iff some strictly positive y has
/// (Y I_E) y = 0 (Stiemke alternative), decided by a feasibility LP.
template <class T>
bool is_trivial_cone(const ConeDescription<T>& desc)
{
    const Matrix<T>& n = desc.facet_normals();
    if (n.cols() == 0) return true;
    const Vector<T> ones = Vector<T>::Ones(n.cols());
    const Vector<T> rhs = -(n * ones);
    const double tol = is_exact_v<T> ? 0.0 : 1e-12 * std::max(1.0, max_abs(n)) * static_cast<double>(n.cols());
    return linalg::has_nonnegative_solution(n, rhs, tol);
}

template <class T>
std::vector<Vector<T>> extreme_rays(const ConeDescription<T>& desc)
{
    return desc.extreme_rays();
}

struct PolarReport {
    bool inside = false;
    std::vector<double> ray_products;
    std::vector<double> lineality_products;
};

/// f lies in the interior of the polar cone: f is orthogonal to the
/// lineality space and strictly negative against every extreme ray.
/// Exact when both the cone and f are rational.
template <class T, class U>
    requires StateScalarFor<T, U>
PolarReport polar_interior_contains(const ConeDescription<T>& desc, const Vector<U>& f)
{
    if (f.size() != desc.dimension()) throw Error(Errc::shape_mismatch, "vector length differs from the cone dimension");
    const auto& rays = desc.extreme_rays();
    PolarReport report;
    report.inside = true;
    const double f_norm = max_abs(f);

    const Matrix<T>& lin = desc.lineality_basis();
    for (Index c = 0; c < lin.cols(); ++c) {
        if constexpr (is_exact_v<U>) {
            const U p = lin.col(c).dot(f);
            report.lineality_products.push_back(to_double(p));
            if (p != 0) report.inside = false;
        } else {
            Vector<double> w = to_double(Vector<T>(lin.col(c)));
            w /= w.cwiseAbs().maxCoeff();
            const double p = w.dot(f);
            report.lineality_products.push_back(p);
            if (std::abs(p) > 1e-10 * f_norm) report.inside = false;
        }
    }
    for (const auto& r : rays) {
        if constexpr (is_exact_v<U>) {
            const U p = r.dot(f);
            report.ray_products.push_back(to_double(p));
            if (!(p < 0)) report.inside = false;
        } else {
            Vector<double> rd = to_double(r);
            rd /= rd.cwiseAbs().maxCoeff();
            const double p = rd.dot(f);
            report.ray_products.push_back(p);
            if (!(p < -1e-12 * f_norm)) report.inside = false;
        }
    }
    return report;
}

/// Interior membership of f_k(x) in the polar of rec(P_{k,E}) = C_E; needs
/// no equilibrium.
template <class T, class U>
    requires StateScalarFor<T, U>
PolarReport recession_polar_check(const ReactionNetwork<T>& net, const AuxTree& aux, const Vector<U>& x)
{
    net.require_weakly_reversible();
    if (!stratum_contains(net, aux, x))
        throw Error(Errc::point_not_in_stratum, "the state violates a binomial inequality of the given order");
    const ConeDescription<T> cone = region_constraints(net, aux, RegionMode::cone);
    return polar_interior_contains(cone, mass_action_rhs(net, x));
}

} // namespace crnlap
