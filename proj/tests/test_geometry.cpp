#include "catch_amalgamated.hpp"

#include <thread>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace crnlap;
using Catch::Approx;
using fixtures::dvec;
using fixtures::q;

namespace {

std::vector<AuxEdge> chain_edges(std::initializer_list<std::pair<VertexIndex, VertexIndex>> pairs)
{
    std::vector<AuxEdge> out;
    for (auto [s, t] : pairs) out.push_back({s, t});
    return out;
}

ReactionNetwork<Rational> reversible_pair(std::size_t species, Vector<Rational> a, Vector<Rational> b)
{
    auto g = build_digraph<Rational>(numbered_vertices(2), {{"1", "2", q(1)}, {"2", "1", q(1)}});
    Matrix<Rational> y(static_cast<Index>(species), 2);
    y.col(0) = a;
    y.col(1) = b;
    return build_network<Rational>(gen::species_names(species), y, std::move(g));
}

} // namespace

TEST_CASE("monomial evaluation orders")
{
    const auto net = fixtures::three_cycle();
    CHECK(monomial_order(net, dvec({0.5, 0.5})).edges == chain_edges({{0, 1}, {1, 2}}));
    CHECK(monomial_order(net, dvec({1, 1})).edges == chain_edges({{0, 1}, {1, 2}}));
    // values (4, 1, 2) sort to 2, 3, 1
    CHECK(monomial_order(net, dvec({2, 1})).edges == chain_edges({{1, 2}, {2, 0}}));

    const auto two = fixtures::two_component();
    const auto aux = monomial_order(two, dvec({2, 0.5}));
    for (std::size_t e = 0; e < aux.edges.size(); ++e)
        CHECK(two.graph().component_of(aux.edges[e].source) == two.graph().component_of(aux.edges[e].target));
    CHECK(aux.edges.size() == 3);
}

TEST_CASE("stratum membership")
{
    const auto net = fixtures::three_cycle();
    const auto aux = make_chain_tree(net.graph(), {{0, 1, 2}});
    CHECK(stratum_contains(net, aux, dvec({0.5, 0.5})));
    CHECK_FALSE(stratum_contains(net, aux, dvec({2, 1})));
    CHECK(stratum_contains(net, aux, dvec({1, 1})));
    CHECK(stratum_contains(net, make_chain_tree(net.graph(), {{2, 1, 0}}), dvec({1, 1})));
    CHECK(stratum_contains(net, aux, fixtures::vec<Rational>({q(1, 2), q(1, 2)})));
    AuxTree broken{{{0, 1}}, AuxKind::chain, {0}};
    CHECK_THROWS_MATCHES(stratum_contains(net, broken, dvec({1, 1})), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::invalid_aux_tree; }));
}

TEST_CASE("cone and polyhedron constraints")
{
    const auto net = fixtures::three_cycle();
    const auto aux = make_chain_tree(net.graph(), {{0, 1, 2}});
    const auto cone = region_constraints(net, aux);
    Matrix<Rational> expected(2, 2);
    expected << -2, 1, 1, -2;
    CHECK((cone.facet_normals().array() == expected.array()).all());
    CHECK(cone.lineality_basis().cols() == 0);
    CHECK_FALSE(is_trivial_cone(cone));
    CHECK_THROWS_AS(region_constraints(net, aux, RegionMode::cone, dvec({1, 1})), Error);

    const auto two = fixtures::two_component();
    const auto aux2 = make_chain_tree(two.graph(), {{0, 1, 2}, {3, 4}});
    const auto cone2 = region_constraints(two, aux2);
    CHECK(cone2.facet_normals()(0, 2) == 1);
    CHECK(cone2.facet_normals()(1, 2) == 1);
    CHECK(is_trivial_cone(cone2));
    CHECK(cone2.extreme_rays().empty());

    const auto lone = build_network<Rational>({"A", "B"}, Matrix<Rational>::Identity(2, 2),
                                              build_digraph<Rational>({"u", "v"}, {}));
    const auto cone3 = region_constraints(lone, default_chain_tree(lone.graph()));
    CHECK(is_trivial_cone(cone3));
    CHECK(cone3.lineality_basis().cols() == 2);
}

TEST_CASE("extreme rays")
{
    const auto net = fixtures::three_cycle();
    const auto cone = region_constraints(net, make_chain_tree(net.graph(), {{0, 1, 2}}));
    const auto& rays = cone.extreme_rays();
    REQUIRE(rays.size() == 2);
    CHECK((rays[0].array() == fixtures::vec<Rational>({q(-2), q(-1)}).array()).all());
    CHECK((rays[1].array() == fixtures::vec<Rational>({q(-1), q(-2)}).array()).all());

    // a half-space: one ray along the normal, one lineality direction
    const auto half = reversible_pair(2, fixtures::vec<Rational>({q(0), q(0)}), fixtures::vec<Rational>({q(1), q(0)}));
    const auto hcone = region_constraints(half, make_chain_tree(half.graph(), {{0, 1}}));
    REQUIRE(hcone.extreme_rays().size() == 1);
    CHECK((hcone.extreme_rays()[0].array() == fixtures::vec<Rational>({q(1), q(0)}).array()).all());
    CHECK(hcone.lineality_basis().cols() == 1);
    CHECK_FALSE(is_trivial_cone(hcone));

    Vector<Rational> e1 = Vector<Rational>::Zero(11), e2 = Vector<Rational>::Zero(11);
    e1(0) = 1;
    e2(1) = 1;
    const auto big = reversible_pair(11, e1, e2);
    const auto bcone = region_constraints(big, default_chain_tree(big.graph()));
    CHECK_THROWS_MATCHES(bcone.extreme_rays(), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::dimension_too_large; }));
}

TEST_CASE("polar interior membership")
{
    const auto net = fixtures::three_cycle();
    const auto cone = region_constraints(net, make_chain_tree(net.graph(), {{0, 1, 2}}));
    const auto inside = polar_interior_contains(cone, dvec({0.5, 0.125}));
    CHECK(inside.inside);
    REQUIRE(inside.ray_products.size() == 2);
    // float products use rays scaled to unit max-norm
    CHECK(inside.ray_products[0] == Approx(-0.5625));
    CHECK(inside.ray_products[1] == Approx(-0.375));
    CHECK_FALSE(polar_interior_contains(cone, dvec({0, 0})).inside);
    CHECK_FALSE(polar_interior_contains(cone, dvec({-1, -2})).inside);
    CHECK(polar_interior_contains(cone, fixtures::vec<Rational>({q(1, 2), q(1, 8)})).inside);
}

TEST_CASE("recession cone polar check")
{
    const auto net = fixtures::three_cycle();
    const auto aux = make_chain_tree(net.graph(), {{0, 1, 2}});
    CHECK(recession_polar_check(net, aux, dvec({0.5, 0.5})).inside);
    CHECK_FALSE(recession_polar_check(net, aux, dvec({1, 1})).inside);
    CHECK_THROWS_MATCHES(recession_polar_check(net, aux, dvec({2, 1})), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::point_not_in_stratum; }));

    gen::Rng rng(301);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto species = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
        const auto rnet = gen::random_wr_network(rng, species, static_cast<std::size_t>(gen::uniform_int(rng, 2, 6)));
        for (int s = 0; s < 3; ++s) {
            const auto x = gen::random_state(rng, species);
            const auto f = mass_action_rhs(rnet, x);
            if (f.cwiseAbs().maxCoeff() <= 1e-12) continue;
            REQUIRE(recession_polar_check(rnet, monomial_order(rnet, x), x).inside);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("strata cover the positive orthant")
{
    gen::Rng rng(303);
    for (int trial = 0; trial < 40; ++trial) {
        const auto species = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
        const auto net = gen::random_wr_network(rng, species, static_cast<std::size_t>(gen::uniform_int(rng, 2, 5)));
        const auto trees = all_chain_trees(net.graph());
        for (int s = 0; s < 10; ++s) {
            const auto x = gen::random_state(rng, species);
            REQUIRE(stratum_contains(net, monomial_order(net, x), x));
            const bool covered = std::any_of(trees.begin(), trees.end(),
                                             [&](const AuxTree& aux) { return stratum_contains(net, aux, x); });
            REQUIRE(covered);
        }
    }
}

TEST_CASE("log-coordinate equivalence of strata, polyhedra and cones")
{
    gen::Rng rng(305);
    for (int trial = 0; trial < 40; ++trial) {
        const auto species = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
        const auto planted = gen::planted_cbe_network(rng, species, static_cast<std::size_t>(gen::uniform_int(rng, 2, 5)));
        const auto& net = planted.network;
        const Vector<double> x_star = to_double(planted.x_star);
        const auto trees = all_chain_trees(net.graph());
        for (int s = 0; s < 5; ++s) {
            const auto x = gen::random_state(rng, species);
            const Vector<double> log_x = x.array().log().matrix();
            const Vector<double> u = (x.array() / x_star.array()).log().matrix();
            for (const auto& aux : trees) {
                const bool in = stratum_contains(net, aux, x);
                REQUIRE(region_constraints(net, aux, RegionMode::polyhedron).contains(log_x) == in);
                REQUIRE(region_constraints(net, aux, RegionMode::cone).contains(u) == in);
                REQUIRE(region_constraints(net, aux, RegionMode::polyhedron, x_star).contains(u) == in);
            }
        }
    }
}

TEST_CASE("lineality spaces and extreme rays on random networks")
{
    gen::Rng rng(307);
    for (int trial = 0; trial < 60; ++trial) {
        const auto species = static_cast<std::size_t>(gen::uniform_int(rng, 1, 4));
        const auto net = gen::random_wr_network(rng, species, static_cast<std::size_t>(gen::uniform_int(rng, 2, 6)));
        const auto aux = monomial_order(net, gen::random_state(rng, species));
        const auto cone = region_constraints(net, aux);
        const auto& lin = cone.lineality_basis();
        const auto& perp = net.s_perp_basis();
        Matrix<Rational> both(static_cast<Index>(species), lin.cols() + perp.cols());
        both << lin, perp;
        REQUIRE(linalg::rank(lin) == linalg::rank(perp));
        REQUIRE(linalg::rank(both) == linalg::rank(perp));

        const auto& rays = cone.extreme_rays();
        const bool trivial = is_trivial_cone(cone);
        REQUIRE(trivial == rays.empty());
        const Index dim = static_cast<Index>(species) - lin.cols();
        for (const auto& r : rays) {
            const Vector<Rational> slack = cone.facet_normals().transpose() * r;
            REQUIRE((slack.array() >= Rational(0)).all());
            REQUIRE((slack.array() > Rational(0)).any());
            const Vector<Rational> along = lin.transpose() * r;
            REQUIRE((along.array() == Rational(0)).all());
            // tight constraints span a space of dimension dim - 1
            Matrix<Rational> tight(static_cast<Index>(species), 0);
            for (Index e = 0; e < slack.size(); ++e)
                if (slack(e) == 0) {
                    tight.conservativeResize(Eigen::NoChange, tight.cols() + 1);
                    tight.col(tight.cols() - 1) = cone.facet_normals().col(e);
                }
            REQUIRE(linalg::rank(tight) == dim - 1);
        }
    }
}

TEST_CASE("float networks give the same rays")
{
    const auto net = fixtures::three_cycle<double>();
    const auto cone = region_constraints(net, make_chain_tree(net.graph(), {{0, 1, 2}}));
    const auto& rays = cone.extreme_rays();
    REQUIRE(rays.size() == 2);
    CHECK(rays[0](0) == Approx(-1.0));
    CHECK(rays[0](1) == Approx(-0.5));
    CHECK(polar_interior_contains(cone, dvec({0.5, 0.125})).inside);
}

TEST_CASE("ray cache is initialized once under concurrency")
{
    const auto net = fixtures::three_cycle();
    const auto cone = region_constraints(net, make_chain_tree(net.graph(), {{0, 1, 2}}));
    const auto copy = cone;
    std::vector<const std::vector<Vector<Rational>>*> seen(8, nullptr);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < seen.size(); ++i)
        threads.emplace_back([&, i] { seen[i] = &(i % 2 ? copy : cone).extreme_rays(); });
    for (auto& t : threads) t.join();
    for (auto* p : seen) CHECK(p == seen[0]);
}

TEST_CASE("admissible orders expand ties")
{
    const auto net = fixtures::three_cycle();
    const auto all = admissible_chain_orders(net, dvec({1, 1}));
    REQUIRE(all);
    CHECK(all->size() == 6);
    const auto one = admissible_chain_orders(net, dvec({0.5, 0.5}));
    REQUIRE(one);
    CHECK(one->size() == 1);
    CHECK_FALSE(admissible_chain_orders(net, dvec({1, 1}), 5).has_value());
}
