#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "crnlap/equilibria.hpp"
#include "crnlap/error.hpp"
#include "crnlap/geometry.hpp"
#include "crnlap/laplacian.hpp"
#include "crnlap/network.hpp"
#include "crnlap/scalar.hpp"

namespace crnlap {

/// L(x) = sum_i x_i (ln(x_i/x*_i) - 1) + x*_i.
inline double lyapunov_value(const Vector<double>& x, const Vector<double>& x_star)
{
    require_positive_state(x, static_cast<std::size_t>(x_star.size()));
    require_positive_state(x_star, static_cast<std::size_t>(x.size()));
    double sum = 0.0;
    for (Index i = 0; i < x.size(); ++i) sum += x(i) * (std::log(x(i) / x_star(i)) - 1.0) + x_star(i);
    return sum;
}

/// Gradient of L: ln(x/x*).
inline Vector<double> lyapunov_gradient(const Vector<double>& x, const Vector<double>& x_star)
{
    return (x.array() / x_star.array()).log().matrix();
}

/// ln(x/x*) . f_k(x).
template <class T>
double lyapunov_derivative(const ReactionNetwork<T>& net, const Vector<double>& x, const Vector<double>& x_star)
{
    require_positive_state(x, net.species_count());
    require_positive_state(x_star, net.species_count());
    require_cbe(net, x_star);
    return lyapunov_gradient(x, x_star).dot(mass_action_rhs(net, x));
}

enum class Verdict { strict_decrease, equilibrium, failure };

constexpr std::string_view verdict_name(Verdict v) noexcept
{
    switch (v) {
    case Verdict::strict_decrease: return "strict_decrease";
    case Verdict::equilibrium: return "equilibrium";
    case Verdict::failure: return "failure";
    }
    return "failure";
}

template <class T>
struct StabilityCertificate {
    AuxTree aux;              // monomial order at x
    Vector<double> a;         // (Y I_E)^T ln(x/x*)
    Vector<double> b;         // I_E^T diag(K^-1) x^Y
    Matrix<T> core;
    double value = 0.0;       // -a^T core b
    std::optional<std::size_t> witness_edge; // a_e > 0 and b_e > 0
    Verdict verdict = Verdict::failure;
    std::string note;
};

/// Lyapunov decrease at x certified through the chain core matrix of the
/// monomial order at x.
template <class T>
StabilityCertificate<T> decrease_certificate(const ReactionNetwork<T>& net, const Vector<double>& x,
                                             const Vector<double>& x_star, double rel_tol = 1e-12)
{
    require_positive_state(x, net.species_count());
    require_positive_state(x_star, net.species_count());
    require_cbe(net, x_star);

    StabilityCertificate<T> cert;
    cert.aux = monomial_order(net, x);
    const auto d = core_matrix(net.graph(), cert.aux);
    cert.core = d.core;
    const Matrix<double> inc = aux_incidence<double>(cert.aux, net.graph().vertex_count());
    const Matrix<double> normals = to_double(net.complexes()) * inc;
    cert.a = normals.transpose() * lyapunov_gradient(x, x_star);
    cert.b = binomial_vector(net, cert.aux, x);
    cert.value = -cert.a.dot(to_double(cert.core) * cert.b);

    const double b_scale = scaled_monomials(net, x).cwiseAbs().maxCoeff();
    const double a_scale = std::max(1.0, cert.a.size() ? cert.a.cwiseAbs().maxCoeff() : 0.0);
    for (Index e = 0; e < cert.a.size(); ++e) {
        if (cert.a(e) < -rel_tol * a_scale || cert.b(e) < -rel_tol * b_scale) {
            cert.note = "sign violation on aux edge " + std::to_string(e);
            return cert;
        }
    }
    const bool b_zero = cert.b.size() == 0 || cert.b.cwiseAbs().maxCoeff() <= rel_tol * b_scale;
    if (b_zero) {
        cert.verdict = Verdict::equilibrium;
        return cert;
    }
    for (Index e = 0; e < cert.a.size(); ++e)
        if (cert.a(e) > 0.0 && cert.b(e) > 0.0) {
            cert.witness_edge = static_cast<std::size_t>(e);
            break;
        }
    if (!cert.witness_edge) {
        cert.note = "no aux edge with a > 0 and b > 0";
        return cert;
    }
    if (cert.value < 0.0)
        cert.verdict = Verdict::strict_decrease;
    else
        cert.note = "certificate value is not negative";
    return cert;
}

enum class BdiVerdict { member, not_member, indeterminate };

constexpr std::string_view bdi_verdict_name(BdiVerdict v) noexcept
{
    switch (v) {
    case BdiVerdict::member: return "member";
    case BdiVerdict::not_member: return "not_member";
    case BdiVerdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

struct BdiResult {
    BdiVerdict verdict = BdiVerdict::indeterminate;
    bool on_equilibrium_manifold = false;
    std::size_t orders_checked = 0;
    std::vector<PolarReport> reports;
};

/// v in F(ln(x/x*)): {0} on the equilibrium manifold, otherwise the interior
/// of the intersection of the polar cones of every chain order admissible
/// at x. More than `cap` admissible orders gives Indeterminate.
template <class T>
BdiResult bdi_membership(const ReactionNetwork<T>& net, const Vector<double>& x_star, const Vector<double>& x,
                         const Vector<double>& v, std::size_t cap = 64)
{
    require_positive_state(x, net.species_count());
    require_positive_state(x_star, net.species_count());
    require_cbe(net, x_star);
    if (static_cast<std::size_t>(v.size()) != net.species_count())
        throw Error(Errc::shape_mismatch, "vector length differs from the species count");

    BdiResult out;
    const Vector<double> u = lyapunov_gradient(x, x_star);
    const Matrix<double> s = orthonormal_columns(to_double(net.s_basis()));
    const double s_part = s.cols() ? (s.transpose() * u).cwiseAbs().maxCoeff() : 0.0;
    if (s_part <= 1e-10 * std::max(1.0, u.cwiseAbs().maxCoeff())) {
        out.on_equilibrium_manifold = true;
        const double scale = std::max(1.0, flux_scale(net, monomial_vector(net, x)));
        out.verdict = v.cwiseAbs().maxCoeff() <= 1e-12 * scale ? BdiVerdict::member : BdiVerdict::not_member;
        return out;
    }

    const auto orders = admissible_chain_orders(net, x, cap);
    if (!orders) return out;
    out.verdict = BdiVerdict::member;
    for (const auto& aux : *orders) {
        const auto cone = region_constraints(net, aux, RegionMode::cone);
        out.reports.push_back(polar_interior_contains(cone, v));
        ++out.orders_checked;
        if (!out.reports.back().inside) out.verdict = BdiVerdict::not_member;
    }
    return out;
}

struct SimulationControls {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 1e-3;
    std::optional<Vector<double>> x_star;
    std::size_t max_steps = 1'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector<double>> states;
    std::vector<double> lyapunov; // empty when no reference equilibrium is known
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::optional<Vector<double>> x_star;
};

/// Adaptive Dormand-Prince 4(5) integration of dx/dt = f_k(x). Steps that
/// leave the positive orthant are rejected and retried with half the step.
template <class T>
Trajectory simulate(const ReactionNetwork<T>& net, const Vector<double>& x0, double t_end,
                    const SimulationControls& controls = {})
{
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    require_positive_state(x0, net.species_count());
    if (!(t_end > 0.0)) throw Error(Errc::invalid_argument, "t_end must be positive");

    Trajectory traj;
    if (controls.x_star) {
        require_cbe(net, *controls.x_star);
        traj.x_star = controls.x_star;
    } else if (net.weakly_reversible()) {
        const CbeResult cbe = solve_cbe(net);
        if (cbe.status == CbeStatus::found) {
            // The trajectory stays in its stoichiometric class, so measure L
            // against the equilibrium of that class.
            traj.x_star = birch_intersect(net, cbe.witness, x0).point;
        }
    }

    const Matrix<double> y = to_double(net.complexes());
    const Matrix<double> a = to_double(net.laplacian());
    const Matrix<double> ya = y * a;
    auto system = [&](const State& x, State& dxdt, double) {
        Vector<double> mono(y.cols());
        for (Index v = 0; v < y.cols(); ++v) {
            double m = 1.0;
            for (Index s = 0; s < y.rows(); ++s)
                if (y(s, v) != 0.0) m *= std::pow(x[static_cast<std::size_t>(s)], y(s, v));
            mono(v) = m;
        }
        const Vector<double> f = ya * mono;
        for (Index s = 0; s < f.size(); ++s) dxdt[static_cast<std::size_t>(s)] = f(s);
    };
    auto to_vector = [](const State& s) {
        Vector<double> v(static_cast<Index>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) v(static_cast<Index>(i)) = s[i];
        return v;
    };
    auto record = [&](double t, const State& s) {
        traj.times.push_back(t);
        traj.states.push_back(to_vector(s));
        if (traj.x_star) traj.lyapunov.push_back(lyapunov_value(traj.states.back(), *traj.x_star));
    };

    auto stepper = odeint::make_controlled(controls.atol, controls.rtol, odeint::runge_kutta_dopri5<State>());
    State x(x0.data(), x0.data() + x0.size());
    double t = 0.0;
    double dt = std::min(controls.initial_step, t_end);
    record(t, x);

    while (t < t_end) {
        if (traj.accepted + traj.rejected >= controls.max_steps)
            throw Error(Errc::no_convergence, "step budget exhausted at t = " + std::to_string(t));
        if (dt < 1e-14 * std::max(1.0, t))
            throw Error(Errc::step_size_underflow, "step size underflow at t = " + std::to_string(t));
        dt = std::min(dt, t_end - t);

        const State saved = x;
        const double t_saved = t;
        const double dt_saved = dt;
        if (stepper.try_step(system, x, t, dt) == odeint::fail) {
            ++traj.rejected;
            continue;
        }
        bool positive = true;
        for (double v : x) positive = positive && v > 0.0;
        if (!positive) {
            x = saved;
            t = t_saved;
            dt = dt_saved / 2;
            stepper.reset(); // drop the cached derivative at the rejected endpoint
            ++traj.rejected;
            continue;
        }
        if (t_end - t <= 1e-15 * std::max(1.0, t_end)) t = t_end;
        ++traj.accepted;
        record(t, x);
    }
    return traj;
}

} // namespace crnlap
