#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "crnlap/error.hpp"
#include "crnlap/graph.hpp"
#include "crnlap/network.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap {

struct CbeCheck {
    bool balanced = false;
    double residual = 0.0; // ||A_k x^Y||_inf
    double scale = 0.0;    // ||diag(k) I_{E,s}^T x^Y||_inf, the largest edge flux
};

/// Largest edge flux k_e x^{y(source e)}.
template <class T, class U>
double flux_scale(const ReactionNetwork<T>& net, const Vector<U>& mono)
{
    double scale = 0.0;
    for (const auto& e : net.graph().edges())
        scale = std::max(scale, std::abs(to_double(e.label) * to_double(mono(static_cast<Index>(e.source)))));
    return scale;
}

/// A_k x^Y = 0: exact for rational states, relative to the edge fluxes otherwise.
template <class T, class U>
    requires StateScalarFor<T, U>
CbeCheck is_cbe(const ReactionNetwork<T>& net, const Vector<U>& x, double rel_tol = 1e-10)
{
    const Vector<U> mono = monomial_vector(net, x);
    const Vector<U> flow = net.template laplacian_as<U>() * mono;
    CbeCheck out;
    out.residual = max_abs(flow);
    out.scale = flux_scale(net, mono);
    if constexpr (is_exact_v<U>)
        out.balanced = (flow.array() == U(0)).all();
    else
        out.balanced = out.residual <= rel_tol * out.scale;
    return out;
}

template <class T>
void require_cbe(const ReactionNetwork<T>& net, const Vector<double>& x_star)
{
    if (!is_cbe(net, x_star).balanced)
        throw Error(Errc::not_a_cbe, "the supplied reference state is not a complex-balanced equilibrium");
}

/// Orthonormal basis (columns) of the span of `m`'s columns.
inline Matrix<double> orthonormal_columns(const Matrix<double>& m)
{
    if (m.cols() == 0) return Matrix<double>(m.rows(), 0);
    Eigen::ColPivHouseholderQR<Matrix<double>> qr(m);
    const Index r = qr.rank();
    Matrix<double> q = qr.householderQ();
    return q.leftCols(r);
}

template <class T>
Matrix<double> orthonormal_s_perp(const ReactionNetwork<T>& net)
{
    return orthonormal_columns(to_double(net.s_perp_basis()));
}

enum class CbeStatus { found, infeasible };

struct CbeResult {
    CbeStatus status = CbeStatus::infeasible;
    Vector<double> witness;
    std::optional<Vector<Rational>> rational_witness; // set when a rational point passes the exact test
    double log_residual = 0.0;
    double balance_residual = 0.0;
};

/// Solves (Y I_E)^T z = I_E^T ln K_k in the least-squares sense (minimum
/// norm) for the default chain tree; consistent systems give x* = exp(z).
template <class T>
CbeResult solve_cbe(const ReactionNetwork<T>& net, double rel_tol = 1e-9)
{
    net.require_weakly_reversible();
    const auto& g = net.graph();
    const AuxTree aux = default_chain_tree(g);
    const Matrix<double> inc = aux_incidence<double>(aux, g.vertex_count());
    const Matrix<double> normals = to_double(net.complexes()) * inc;
    const Vector<double> log_k = net.template tree_constants_as<double>().array().log().matrix();
    const Vector<double> rhs = inc.transpose() * log_k;
    const Matrix<double> system = normals.transpose();

    CbeResult out;
    Vector<double> z = Vector<double>::Zero(static_cast<Index>(net.species_count()));
    if (system.rows() > 0 && system.cols() > 0) {
        Eigen::CompleteOrthogonalDecomposition<Matrix<double>> cod(system);
        z = cod.solve(rhs);
    }
    out.log_residual = system.rows() > 0 ? (system * z - rhs).norm() : 0.0;
    // The floor keeps a zero right-hand side decidable.
    const bool consistent = out.log_residual <= rel_tol * rhs.norm() + 1e-12;
    if (!consistent) return out;

    out.status = CbeStatus::found;
    out.witness = z.array().exp().matrix();
    const CbeCheck check = is_cbe(net, out.witness);
    out.balance_residual = check.scale > 0 ? check.residual / check.scale : check.residual;

    if constexpr (is_exact_v<T>) {
        if (net.integer_complexes()) {
            Vector<Rational> q(out.witness.size());
            for (Index i = 0; i < q.size(); ++i) q(i) = rationalize(out.witness(i));
            bool positive = true;
            for (Index i = 0; i < q.size(); ++i) positive = positive && q(i) > 0;
            if (positive && is_cbe(net, q).balanced) out.rational_witness = q;
        }
    }
    return out;
}

/// Points x* o exp(w), w uniform in the unit cube of an orthonormal S-perp frame.
template <class T>
std::vector<Vector<double>> cbe_manifold_sample(const ReactionNetwork<T>& net, const Vector<double>& x_star,
                                                std::size_t count, std::uint64_t seed)
{
    require_positive_state(x_star, net.species_count());
    require_cbe(net, x_star);
    const Matrix<double> w = orthonormal_s_perp(net);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<Vector<double>> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Vector<double> c(w.cols());
        for (Index j = 0; j < c.size(); ++j) c(j) = coeff(rng);
        const Vector<double> shift = w * c;
        out.push_back((x_star.array() * shift.array().exp()).matrix());
    }
    return out;
}

struct BirchOptions {
    std::optional<Vector<double>> initial; // coordinates in the orthonormal S-perp frame
    int max_iterations = 200;
    double gradient_tol = 1e-14;
};

struct BirchResult {
    Vector<double> point;
    int iterations = 0;
    double gradient_norm = 0.0;
    double manifold_residual = 0.0; // ||P_S ln(x/x*)||_inf
    double class_residual = 0.0;    // ||W^T (x - x')||_inf / max(1, ||x'||_inf)
};

/// The unique point of (x* o e^{S-perp}) n (x' + S): damped Newton on
/// h(c) = sum_i x*_i e^{(Wc)_i} - c.(W^T x').
template <class T>
BirchResult birch_intersect(const ReactionNetwork<T>& net, const Vector<double>& x_star,
                            const Vector<double>& x_prime, const BirchOptions& options = {})
{
    require_positive_state(x_star, net.species_count());
    require_positive_state(x_prime, net.species_count());
    require_cbe(net, x_star);

    const Matrix<double> w = orthonormal_s_perp(net);
    const Index d = w.cols();
    const Vector<double> target = w.transpose() * x_prime;
    const double scale = std::max({1.0, x_prime.cwiseAbs().maxCoeff(), x_star.cwiseAbs().maxCoeff()});

    auto point_at = [&](const Vector<double>& c) -> Vector<double> {
        return (x_star.array() * (w * c).array().exp()).matrix();
    };
    auto objective = [&](const Vector<double>& c) { return point_at(c).sum() - c.dot(target); };

    Vector<double> c = Vector<double>::Zero(d);
    if (options.initial) {
        if (options.initial->size() != d) throw Error(Errc::shape_mismatch, "initial point has the wrong dimension");
        c = *options.initial;
    }

    BirchResult out;
    bool converged = d == 0;
    for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
        const Vector<double> x = point_at(c);
        const Vector<double> grad = w.transpose() * x - target;
        out.gradient_norm = grad.cwiseAbs().maxCoeff();
        out.iterations = iter;
        if (out.gradient_norm <= options.gradient_tol * scale) {
            converged = true;
            break;
        }
        const Matrix<double> hess = w.transpose() * x.asDiagonal() * w;
        const Vector<double> step = -hess.ldlt().solve(grad);
        const double h0 = objective(c);
        double t = 1.0;
        bool decreased = false;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            if (objective(c + t * step) < h0) {
                decreased = true;
                break;
            }
        }
        if (!decreased) {
            // At round-off level h no longer resolves progress; keep taking
            // full Newton steps while they shrink the gradient.
            const Vector<double> trial = c + step;
            const double g_trial = (w.transpose() * point_at(trial) - target).cwiseAbs().maxCoeff();
            if (g_trial < out.gradient_norm) {
                c = trial;
                out.iterations = iter + 1;
                continue;
            }
            converged = out.gradient_norm <= 1e-9 * scale;
            break;
        }
        c += t * step;
        out.iterations = iter + 1;
    }
    if (!converged) {
        const Vector<double> grad = w.transpose() * point_at(c) - target;
        out.gradient_norm = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
        if (out.gradient_norm > options.gradient_tol * scale)
            throw Error(Errc::no_convergence, "damped Newton stalled with gradient norm " +
                                                  std::to_string(out.gradient_norm));
    }
    out.point = point_at(c);

    const Vector<double> u = (out.point.array() / x_star.array()).log().matrix();
    const Matrix<double> s = orthonormal_columns(to_double(net.s_basis()));
    out.manifold_residual = s.cols() ? (s.transpose() * u).cwiseAbs().maxCoeff() : 0.0;
    out.class_residual =
        d ? (w.transpose() * (out.point - x_prime)).cwiseAbs().maxCoeff() / std::max(1.0, x_prime.cwiseAbs().maxCoeff())
          : 0.0;
    return out;
}

} // namespace crnlap
