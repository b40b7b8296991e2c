#include "catch_amalgamated.hpp"

#include <fstream>
#include <sstream>

#include "crnlap/io.hpp"
#include "fixtures.hpp"

using namespace crnlap;
using fixtures::q;

namespace {

std::string read_data(const std::string& name)
{
    std::ifstream in(std::string(CRNLAP_DATA_DIR) + "/" + name);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

io::Json three_cycle_json() { return io::Json::parse(read_data("three_cycle.json")); }

Error capture(const std::string& text, io::NumberMode mode = io::NumberMode::automatic)
{
    try {
        io::parse_network(text, mode);
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected a parse error");
    return Error(Errc::invalid_argument, "");
}

} // namespace

TEST_CASE("bundled running example parses in exact mode")
{
    const auto parsed = io::parse_network(read_data("running_example.json"));
    REQUIRE(parsed.exact());
    const auto& net = std::get<0>(parsed.network);
    CHECK(net.graph().components().size() == 1);
    CHECK(net.graph().edge_count() == 4);
    const auto& k = net.tree_constants().values;
    CHECK(k(0) == q(7));
    CHECK(k(1) == q(2));
    CHECK(k(2) == q(3));
    CHECK(parsed.document.metadata.at("name") == "running example");
}

TEST_CASE("every bundled file parses")
{
    for (const char* name : {"three_cycle.json", "running_example.json", "two_component.json", "conserving.json"}) {
        const auto parsed = io::parse_network(read_data(name));
        CHECK(parsed.exact());
        CHECK(std::get<0>(parsed.network).weakly_reversible());
    }
}

TEST_CASE("schema errors carry field paths")
{
    auto doc = three_cycle_json();
    doc["edges"][1].erase("k");
    const auto missing = capture(doc.dump());
    CHECK(missing.code() == Errc::schema_error);
    CHECK(missing.path() == "edges[1]");
    CHECK_THAT(std::string(missing.what()), Catch::Matchers::ContainsSubstring("edges[1]"));

    doc = three_cycle_json();
    doc["vertices"][0]["complex"]["X1"] = "two";
    CHECK(capture(doc.dump()).path() == "vertices[0].complex.X1");

    doc = three_cycle_json();
    doc["extra"] = 1;
    CHECK(capture(doc.dump()).code() == Errc::schema_error);

    CHECK(capture("{\"species\": [").code() == Errc::schema_error);
    CHECK(capture("[]").path() == "$");

    doc = three_cycle_json();
    doc["edges"][0]["k"] = {{"num", 1}, {"den", 0}};
    CHECK(capture(doc.dump()).path() == "edges[0].k.den");

    doc = three_cycle_json();
    doc["edges"][0]["k"] = 0.5;
    CHECK(capture(doc.dump(), io::NumberMode::exact).code() == Errc::schema_error);
}

TEST_CASE("semantic errors name their cause")
{
    auto doc = three_cycle_json();
    doc["edges"][2]["k"] = 0;
    const auto zero = capture(doc.dump());
    CHECK(zero.code() == Errc::semantic_error);
    CHECK(zero.path() == "edges[2].k");
    CHECK(zero.detail().rfind("NonPositiveLabel", 0) == 0);

    doc = three_cycle_json();
    doc["vertices"][1]["complex"] = {{"X1", 2}, {"X2", 1}};
    const auto dup = capture(doc.dump());
    CHECK(dup.code() == Errc::semantic_error);
    CHECK(dup.detail().rfind("DuplicateComplex", 0) == 0);

    doc = three_cycle_json();
    doc["edges"][0]["to"] = "9";
    CHECK(capture(doc.dump()).detail().rfind("UnknownEndpoint", 0) == 0);

    doc = three_cycle_json();
    doc["vertices"][0]["complex"]["Z"] = 1;
    CHECK(capture(doc.dump()).code() == Errc::semantic_error);

    doc = three_cycle_json();
    doc["vertices"][0]["complex"]["X1"] = -1;
    CHECK(capture(doc.dump()).detail().rfind("NegativeComplexEntry", 0) == 0);
}

TEST_CASE("number modes")
{
    auto doc = three_cycle_json();
    doc["edges"][0]["k"] = 0.25;
    const auto floating = io::parse_network(doc.dump());
    CHECK_FALSE(floating.exact());
    CHECK(std::get<1>(floating.network).graph().edge(0).label == 0.25);

    doc = three_cycle_json();
    doc["vertices"][0]["complex"]["X1"] = "1/2";
    CHECK_FALSE(io::parse_network(doc.dump()).exact());
    CHECK_FALSE(io::parse_network(read_data("three_cycle.json"), io::NumberMode::floating).exact());
    CHECK(io::parse_network(read_data("three_cycle.json"), io::NumberMode::exact).exact());

    doc = three_cycle_json();
    doc["edges"][0]["k"] = "0.1";
    const auto decimal = io::parse_network(doc.dump());
    REQUIRE(decimal.exact());
    CHECK(std::get<0>(decimal.network).graph().edge(0).label == q(1, 10));

    CHECK(io::parse_mode("exact") == io::NumberMode::exact);
    CHECK_THROWS_AS(io::parse_mode("fast"), Error);
}

TEST_CASE("documents round-trip")
{
    for (const char* name : {"three_cycle.json", "running_example.json", "two_component.json", "conserving.json"}) {
        const auto doc = io::parse_document(io::Json::parse(read_data(name)));
        const std::string text = io::serialize_network(doc);
        const auto again = io::parse_document(io::Json::parse(text));
        CHECK(again == doc);
        CHECK(io::serialize_network(again) == text);
    }

    auto j = three_cycle_json();
    j["edges"][0]["k"] = 0.1;
    j["edges"][1]["k"] = {{"num", 2}, {"den", 6}};
    const auto doc = io::parse_document(j);
    const auto again = io::parse_document(io::serialize_document(doc));
    CHECK(again == doc);
    CHECK(again.edges[0].k.value == 0.1);
    CHECK(*again.edges[1].k.exact == q(1, 3));
}

TEST_CASE("number serialization")
{
    CHECK(io::number_json(q(3)).dump() == "3");
    CHECK(io::number_json(q(-1, 2)).dump() == "{\"num\":-1,\"den\":2}");
    CHECK(io::number_json(Rational("123456789012345678901234567890")).dump() == "\"123456789012345678901234567890\"");
    CHECK(io::number_json(0.1).dump() == "0.1");
    CHECK(io::number_json(-0.43321698784996583).get<double>() == -0.43321698784996583);
    const auto list = io::parse_number_list("0.5,1/3,2");
    REQUIRE(list.size() == 3);
    CHECK(list[1] == q(1, 3));
    CHECK_THROWS_AS(io::parse_state("1,2", 3), Error);
    CHECK_THROWS_AS(io::parse_number_list("1,,2"), Error);
}

TEST_CASE("aux tree specs")
{
    const auto running = fixtures::running_example();
    const auto chain = io::parse_aux_spec(running, "chain:1,2,3");
    CHECK(chain == make_chain_tree(running, {{0, 1, 2}}));
    CHECK(io::aux_spec_string(running, chain) == "chain:1,2,3");
    const auto star = io::parse_aux_spec(running, "star:root=1");
    CHECK(star == make_star_tree(running, {0}));
    CHECK(io::aux_spec_string(running, star) == "star:1");
    CHECK(io::parse_aux_spec(running, "star:1") == star);

    const auto two = fixtures::two_component().graph();
    const auto swapped = io::parse_aux_spec(two, "chain:5,4;3,1,2");
    CHECK(swapped == make_chain_tree(two, {{2, 0, 1}, {4, 3}}));
    CHECK(io::aux_spec_string(two, swapped) == "chain:3,1,2;5,4");
    CHECK(io::parse_aux_spec(two, "star:root=2;root=5") == make_star_tree(two, {1, 4}));

    auto lonely = build_digraph<Rational>({"a", "b", "c"}, {{"a", "b", q(1)}, {"b", "a", q(1)}});
    CHECK(io::parse_aux_spec(lonely, "chain:b,a").edges.size() == 1);

    CHECK_THROWS_AS(io::parse_aux_spec(running, "chain:1,2"), Error);
    CHECK_THROWS_AS(io::parse_aux_spec(running, "chain:1,2,9"), Error);
    CHECK_THROWS_AS(io::parse_aux_spec(two, "chain:1,2,3"), Error);
    CHECK_THROWS_AS(io::parse_aux_spec(running, "tree:1,2,3"), Error);
    CHECK_THROWS_AS(io::parse_aux_spec(two, "star:1;2"), Error);
}

TEST_CASE("error documents")
{
    const Error err(Errc::schema_error, "edges[0]: missing field \"k\"", "edges[0]");
    const auto j = io::error_json(err);
    CHECK(j.at("error") == "SchemaError");
    CHECK(j.at("path") == "edges[0]");
}
