#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "crnlap/crnlap.hpp"
#include "crnlap/io.hpp"

namespace {

using namespace crnlap;
using io::Json;

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_invalid = 2;
constexpr int exit_infeasible = 3;

struct Options {
    std::string file;
    std::string mode = "auto";
    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::string out;
    std::string aux;
    std::string x;
    std::string x_star;
    std::string v;
    std::string x0;
    double t_end = 10.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    std::size_t samples = 3;
};

struct Outcome {
    Json report;
    int code = exit_ok;
};

int exit_code_for(Errc code)
{
    switch (code) {
    case Errc::no_convergence:
    case Errc::step_size_underflow:
    case Errc::dimension_too_large:
    case Errc::not_weakly_reversible:
    case Errc::not_strongly_connected_components:
        return exit_infeasible;
    default:
        return exit_invalid;
    }
}

void setup_logging()
{
    auto logger = spdlog::stderr_logger_st("crnlap");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("CRNLAP_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

io::ParsedNetwork load(const Options& opts)
{
    std::ifstream in(opts.file);
    if (!in) throw Error(Errc::invalid_argument, "cannot read '" + opts.file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto parsed = io::parse_network(ss.str(), io::parse_mode(opts.mode));
    spdlog::info("loaded {} ({} mode)", opts.file, parsed.exact() ? "exact" : "float");
    return parsed;
}

template <class T>
Json ids_json(const LabeledDigraph<T>& g, const std::vector<VertexIndex>& vs)
{
    Json j = Json::array();
    for (auto v : vs) j.push_back(g.vertex_id(v));
    return j;
}

template <class T>
Json decomposition_json(const LabeledDigraph<T>& g, const CoreDecomposition<T>& d)
{
    const auto report = verify_core_decomposition(d);
    Json checks = Json::array();
    for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"aux", io::aux_json(g, d.aux)},
            {"core", io::matrix_json(d.core)},
            {"residual", io::number_json(d.residual)},
            {"checks", checks},
            {"passed", report.passed()}};
}

template <class T>
AuxTree star_default(const LabeledDigraph<T>& g)
{
    std::vector<VertexIndex> roots;
    for (const auto& c : g.components()) roots.push_back(c.front());
    return make_star_tree(g, roots);
}

Json cbe_json(const CbeResult& cbe)
{
    Json j = {{"status", cbe.status == CbeStatus::found ? "found" : "infeasible"},
              {"log_residual", io::number_json(cbe.log_residual)},
              {"balance_residual", io::number_json(cbe.balance_residual)}};
    if (cbe.status == CbeStatus::found) {
        j["witness"] = io::vector_json(cbe.witness);
        j["exact_witness"] = cbe.rational_witness ? io::vector_json(*cbe.rational_witness) : Json(nullptr);
    }
    return j;
}

/// --xstar when given (must be a CBE), else the solved witness.
template <class T>
std::optional<Vector<double>> reference_point(const ReactionNetwork<T>& net, const Options& opts, Json& report)
{
    if (!opts.x_star.empty()) {
        auto x_star = io::parse_state(opts.x_star, net.species_count());
        require_cbe(net, x_star);
        return x_star;
    }
    const auto cbe = solve_cbe(net, opts.tol);
    report["cbe"] = cbe_json(cbe);
    if (cbe.status != CbeStatus::found) return std::nullopt;
    return cbe.witness;
}

template <class T>
Json header(const char* command, const ReactionNetwork<T>& net)
{
    return {{"command", command}, {"mode", is_exact_v<T> ? "exact" : "float"}, {"species", net.species()}};
}

template <class T>
Outcome analyze(const ReactionNetwork<T>& net, const Options& opts)
{
    const auto& g = net.graph();
    Json r = header("analyze", net);
    r["vertices"] = g.vertex_ids();
    r["edge_count"] = g.edge_count();
    Json comps = Json::array();
    for (const auto& c : g.components()) comps.push_back(ids_json(g, c));
    r["components"] = comps;
    r["weakly_reversible"] = net.weakly_reversible();

    const auto sub = stoichiometric_subspace(net);
    const auto s_dim = static_cast<long long>(sub.s_basis.cols());
    r["stoichiometric_subspace"] = {{"dimension", s_dim},
                                    {"basis", io::columns_json(sub.s_basis)},
                                    {"conservation_laws", io::columns_json(sub.s_perp_basis)}};
    r["deficiency"] = static_cast<long long>(g.vertex_count()) - static_cast<long long>(g.components().size()) - s_dim;

    if (!net.weakly_reversible()) {
        spdlog::warn("network is not weakly reversible; skipping tree constants and decompositions");
        return {r, exit_ok};
    }

    const auto enumerated = tree_constants(g, TreeBackend::enumeration).values;
    const auto& minors = net.tree_constants().values;
    bool agree = true;
    for (Index i = 0; i < minors.size(); ++i) {
        if constexpr (is_exact_v<T>)
            agree = agree && enumerated(i) == minors(i);
        else
            agree = agree && std::abs(enumerated(i) - minors(i)) <= 1e-12 * std::max(std::abs(minors(i)), 1e-300);
    }
    r["tree_constants"] = {{"enumeration", io::vector_json(enumerated)},
                           {"minors", io::vector_json(minors)},
                           {"agree", agree}};

    Json decompositions = Json::array();
    decompositions.push_back(decomposition_json(g, core_matrix(g, default_chain_tree(g))));
    decompositions.push_back(decomposition_json(g, core_matrix(g, star_default(g))));
    if (!opts.aux.empty()) decompositions.push_back(decomposition_json(g, core_matrix(g, io::parse_aux_spec(g, opts.aux))));
    r["decompositions"] = decompositions;

    const auto cycles = cycle_decomposition(g);
    const Matrix<T> balanced = net.laplacian() * minors.asDiagonal();
    const Matrix<T> diff = reconstruct(g, cycles) - balanced;
    r["cycle_decomposition"] = {{"terms", cycles.terms.size()},
                                {"residual", io::number_json(max_abs(diff))}};

    const auto cbe = solve_cbe(net, opts.tol);
    Json cj = cbe_json(cbe);
    if (cbe.status == CbeStatus::found && opts.samples > 0) {
        Json samples = Json::array();
        for (const auto& x : cbe_manifold_sample(net, cbe.witness, opts.samples, opts.seed)) samples.push_back(io::vector_json(x));
        cj["manifold_samples"] = samples;
        cj["seed"] = opts.seed;
    }
    r["cbe"] = cj;
    return {r, exit_ok};
}

template <class T>
Outcome decompose(const ReactionNetwork<T>& net, const Options& opts)
{
    const auto& g = net.graph();
    require_strongly_connected_components(g);
    const AuxTree aux = opts.aux.empty() ? default_chain_tree(g) : io::parse_aux_spec(g, opts.aux);
    const auto d = core_matrix(g, aux);
    const auto generic = core_matrix(g, aux, LeftInverseChoice::generic);

    Json r = header("decompose", net);
    r["laplacian"] = io::matrix_json(d.laplacian);
    r["tree_constants"] = io::vector_json(d.tree_constants.values);
    r["decomposition"] = decomposition_json(g, d);
    r["generic_left_inverse_residual"] = io::number_json(max_abs(Matrix<T>(generic.core - d.core)));
    Json terms = Json::array();
    for (const auto& t : cycle_decomposition(g).terms)
        terms.push_back({{"vertices", ids_json(g, t.cycle.vertices)}, {"coefficient", io::number_json(t.coefficient)}});
    r["cycles"] = terms;
    return {r, d.residual == T(0) || !is_exact_v<T> ? exit_ok : exit_internal};
}

template <class T>
Outcome equilibria(const ReactionNetwork<T>& net, const Options& opts)
{
    Json r = header("equilibria", net);
    net.require_weakly_reversible();
    const auto cbe = solve_cbe(net, opts.tol);
    r["cbe"] = cbe_json(cbe);
    if (cbe.status != CbeStatus::found) return {r, exit_infeasible};

    r["conservation_laws"] = io::columns_json(orthonormal_s_perp(net));
    Json samples = Json::array();
    for (const auto& x : cbe_manifold_sample(net, cbe.witness, opts.samples, opts.seed)) samples.push_back(io::vector_json(x));
    r["manifold_samples"] = samples;
    r["seed"] = opts.seed;
    if (!opts.x0.empty()) {
        const auto x0 = io::parse_state(opts.x0, net.species_count());
        const auto birch = birch_intersect(net, cbe.witness, x0);
        r["birch"] = {{"x0", io::vector_json(x0)},
                      {"point", io::vector_json(birch.point)},
                      {"iterations", birch.iterations},
                      {"manifold_residual", io::number_json(birch.manifold_residual)},
                      {"class_residual", io::number_json(birch.class_residual)}};
    }
    return {r, exit_ok};
}

template <class T>
Json polar_json(const ConeDescription<T>& cone, const PolarReport& p)
{
    Json rays = Json::array();
    for (const auto& ray : cone.extreme_rays()) rays.push_back(io::vector_json(ray));
    Json rp = Json::array(), lp = Json::array();
    for (double v : p.ray_products) rp.push_back(io::number_json(v));
    for (double v : p.lineality_products) lp.push_back(io::number_json(v));
    return {{"inside", p.inside},
            {"rays", rays},
            {"lineality", io::columns_json(cone.lineality_basis())},
            {"ray_products", rp},
            {"lineality_products", lp}};
}

template <class T>
Outcome certify(const ReactionNetwork<T>& net, const Options& opts)
{
    Json r = header("certify", net);
    net.require_weakly_reversible();
    if (opts.x.empty()) throw Error(Errc::invalid_argument, "--x is required");
    const auto x = io::parse_state(opts.x, net.species_count());
    const auto x_star = reference_point(net, opts, r);
    if (!x_star) return {r, exit_infeasible};

    const auto cert = decrease_certificate(net, x, *x_star);
    const auto& g = net.graph();
    r["x"] = io::vector_json(x);
    r["x_star"] = io::vector_json(*x_star);
    r["aux"] = io::aux_json(g, cert.aux);
    r["a"] = io::vector_json(cert.a);
    r["b"] = io::vector_json(cert.b);
    r["core"] = io::matrix_json(cert.core);
    r["value"] = io::number_json(cert.value);
    r["lyapunov_derivative"] = io::number_json(lyapunov_derivative(net, x, *x_star));
    r["lyapunov_value"] = io::number_json(lyapunov_value(x, *x_star));
    if (cert.witness_edge) {
        const auto& e = cert.aux.edges[*cert.witness_edge];
        r["witness_edge"] = Json::array({g.vertex_id(e.source), g.vertex_id(e.target)});
    } else {
        r["witness_edge"] = nullptr;
    }
    r["verdict"] = std::string(verdict_name(cert.verdict));
    if (!cert.note.empty()) r["note"] = cert.note;

    const auto cone = region_constraints(net, cert.aux);
    if (cone.dimension() <= 10)
        r["polar"] = polar_json(cone, polar_interior_contains(cone, mass_action_rhs(net, x)));
    else
        r["polar"] = nullptr;
    return {r, cert.verdict == Verdict::failure ? exit_infeasible : exit_ok};
}

template <class T>
Outcome bdi_check(const ReactionNetwork<T>& net, const Options& opts)
{
    Json r = header("bdi-check", net);
    net.require_weakly_reversible();
    if (opts.x.empty()) throw Error(Errc::invalid_argument, "--x is required");
    const auto x = io::parse_state(opts.x, net.species_count());
    const Vector<double> v = opts.v.empty() ? mass_action_rhs(net, x) : io::parse_state(opts.v, net.species_count());
    const auto x_star = reference_point(net, opts, r);
    if (!x_star) return {r, exit_infeasible};

    const auto result = bdi_membership(net, *x_star, x, v);
    r["x"] = io::vector_json(x);
    r["x_star"] = io::vector_json(*x_star);
    r["v"] = io::vector_json(v);
    r["v_is_vector_field"] = opts.v.empty();
    r["verdict"] = std::string(bdi_verdict_name(result.verdict));
    r["on_equilibrium_manifold"] = result.on_equilibrium_manifold;
    r["orders_checked"] = result.orders_checked;
    Json reports = Json::array();
    for (const auto& p : result.reports) {
        Json rp = Json::array();
        for (double value : p.ray_products) rp.push_back(io::number_json(value));
        reports.push_back({{"inside", p.inside}, {"ray_products", rp}});
    }
    r["reports"] = reports;
    return {r, result.verdict == BdiVerdict::indeterminate ? exit_infeasible : exit_ok};
}

void write_csv(std::ostream& os, const std::vector<std::string>& species, const Trajectory& traj)
{
    os << "t";
    for (const auto& s : species) os << ',' << s;
    if (!traj.lyapunov.empty()) os << ",L";
    os << '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << Json(traj.times[i]).dump();
        for (Index s = 0; s < traj.states[i].size(); ++s) os << ',' << Json(traj.states[i](s)).dump();
        if (!traj.lyapunov.empty()) os << ',' << Json(traj.lyapunov[i]).dump();
        os << '\n';
    }
}

template <class T>
Outcome simulate_command(const ReactionNetwork<T>& net, const Options& opts)
{
    Json r = header("simulate", net);
    if (opts.x0.empty()) throw Error(Errc::invalid_argument, "--x0 is required");
    SimulationControls controls;
    controls.rtol = opts.rtol;
    controls.atol = opts.atol;
    if (!opts.x_star.empty()) controls.x_star = io::parse_state(opts.x_star, net.species_count());
    const auto x0 = io::parse_state(opts.x0, net.species_count());
    const auto traj = simulate(net, x0, opts.t_end, controls);

    const Matrix<double> w = orthonormal_s_perp(net);
    double drift = 0.0;
    for (const auto& x : traj.states) drift = std::max(drift, w.cols() ? (w.transpose() * (x - x0)).cwiseAbs().maxCoeff() : 0.0);
    double max_increase = 0.0;
    for (std::size_t i = 1; i < traj.lyapunov.size(); ++i) max_increase = std::max(max_increase, traj.lyapunov[i] - traj.lyapunov[i - 1]);

    r["x0"] = io::vector_json(x0);
    r["t_end"] = io::number_json(opts.t_end);
    r["final_state"] = io::vector_json(traj.states.back());
    r["accepted_steps"] = traj.accepted;
    r["rejected_steps"] = traj.rejected;
    r["x_star"] = traj.x_star ? io::vector_json(*traj.x_star) : Json(nullptr);
    if (!traj.lyapunov.empty())
        r["lyapunov"] = {{"initial", io::number_json(traj.lyapunov.front())},
                         {"final", io::number_json(traj.lyapunov.back())},
                         {"max_increase", io::number_json(max_increase)}};
    r["conservation_drift"] = io::number_json(drift);

    Json full = r;
    Json times = Json::array(), states = Json::array(), lyap = Json::array();
    for (double t : traj.times) times.push_back(io::number_json(t));
    for (const auto& x : traj.states) states.push_back(io::vector_json(x));
    for (double l : traj.lyapunov) lyap.push_back(io::number_json(l));
    full["trajectory"] = {{"times", times}, {"states", states}, {"lyapunov", lyap}};

    if (opts.out.empty()) return {full, exit_ok};
    std::ofstream os(opts.out);
    if (!os) throw Error(Errc::invalid_argument, "cannot write '" + opts.out + "'");
    if (opts.out.size() >= 4 && opts.out.compare(opts.out.size() - 4, 4, ".csv") == 0)
        write_csv(os, net.species(), traj);
    else
        os << full.dump(2) << '\n';
    spdlog::info("wrote {} states to {}", traj.states.size(), opts.out);
    r["trajectory_file"] = opts.out;
    return {r, exit_ok};
}

template <class Fn>
int run(const Options& opts, bool report_to_out, Fn&& command)
{
    try {
        const auto parsed = load(opts);
        const Outcome outcome = std::visit([&](const auto& net) { return command(net, opts); }, parsed.network);
        const std::string text = outcome.report.dump(2) + "\n";
        if (report_to_out && !opts.out.empty()) {
            std::ofstream os(opts.out);
            if (!os) throw Error(Errc::invalid_argument, "cannot write '" + opts.out + "'");
            os << text;
        } else {
            std::cout << text;
        }
        return outcome.code;
    } catch (const Error& err) {
        std::cerr << io::error_json(err).dump() << '\n';
        return exit_code_for(err.code());
    } catch (const std::exception& err) {
        std::cerr << Json{{"error", "Internal"}, {"message", err.what()}}.dump() << '\n';
        return exit_internal;
    }
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"Laplacian core-matrix analysis of mass-action reaction networks"};
    app.require_subcommand(1);
    Options opts;

    auto common = [&](CLI::App* sub) {
        sub->add_option("network", opts.file, "network document (JSON)")->required();
        sub->add_option("--mode", opts.mode, "number mode: auto, exact or float")
            ->check(CLI::IsMember({"auto", "exact", "float"}));
        sub->add_option("--tol", opts.tol, "relative tolerance for the CBE solve");
        sub->add_option("--seed", opts.seed, "seed for manifold sampling");
        sub->add_option("--out", opts.out, "write the report (or trajectory) to this path");
        return sub;
    };

    auto* analyze_cmd = common(app.add_subcommand("analyze", "components, tree constants, decompositions and CBEs"));
    analyze_cmd->add_option("--aux", opts.aux, "extra aux tree, e.g. chain:1,2,3;4,5 or star:root=1");
    analyze_cmd->add_option("--samples", opts.samples, "points sampled on the CBE manifold");

    auto* decompose_cmd = common(app.add_subcommand("decompose", "core matrix for one aux tree"));
    decompose_cmd->add_option("--aux", opts.aux, "aux tree, e.g. chain:1,2,3;4,5 or star:root=1");

    auto* equilibria_cmd = common(app.add_subcommand("equilibria", "complex-balanced equilibria"));
    equilibria_cmd->add_option("--x0", opts.x0, "state whose stoichiometric class is intersected");
    equilibria_cmd->add_option("--samples", opts.samples, "points sampled on the CBE manifold");

    auto* certify_cmd = common(app.add_subcommand("certify", "Lyapunov decrease certificate at a state"));
    certify_cmd->add_option("--x", opts.x, "state, comma separated")->required();
    certify_cmd->add_option("--xstar", opts.x_star, "reference CBE (solved when omitted)");

    auto* bdi_cmd = common(app.add_subcommand("bdi-check", "binomial differential inclusion membership"));
    bdi_cmd->add_option("--x", opts.x, "state, comma separated")->required();
    bdi_cmd->add_option("--v", opts.v, "direction (defaults to the vector field at x)");
    bdi_cmd->add_option("--xstar", opts.x_star, "reference CBE (solved when omitted)");

    auto* simulate_cmd = common(app.add_subcommand("simulate", "integrate the mass-action system"));
    simulate_cmd->add_option("--x0", opts.x0, "initial state, comma separated")->required();
    simulate_cmd->add_option("--t", opts.t_end, "final time");
    simulate_cmd->add_option("--rtol", opts.rtol, "relative error tolerance");
    simulate_cmd->add_option("--atol", opts.atol, "absolute error tolerance");
    simulate_cmd->add_option("--xstar", opts.x_star, "reference CBE for the Lyapunov values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << Json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
        return exit_invalid;
    }

    if (*analyze_cmd) return run(opts, true, [](const auto& net, const Options& o) { return analyze(net, o); });
    if (*decompose_cmd) return run(opts, true, [](const auto& net, const Options& o) { return decompose(net, o); });
    if (*equilibria_cmd) return run(opts, true, [](const auto& net, const Options& o) { return equilibria(net, o); });
    if (*certify_cmd) return run(opts, true, [](const auto& net, const Options& o) { return certify(net, o); });
    if (*bdi_cmd) return run(opts, true, [](const auto& net, const Options& o) { return bdi_check(net, o); });
    if (*simulate_cmd) return run(opts, false, [](const auto& net, const Options& o) { return simulate_command(net, o); });
    return exit_internal;
}
