#include <algorithm>
#include <set>

#include "chaoskit/density_field.hpp"
#include "chaoskit/network.hpp"
#include "doctest.h"

using namespace chaoskit;

namespace {
const char* kSpecial =
    "kernel k1 = constant(rate=1)\n"
    "S1 + S2 -> S2 + S2 @ k1\n";
}

TEST_CASE("parses the irreversible two-species network") {
    ReactionNetwork net = parse_network(kSpecial);
    CHECK(net.n_species() == 2);
    REQUIRE(net.n_reactions() == 1);
    const Reaction& r = net.reactions()[0];
    CHECK(r.in_a == 1);
    CHECK(r.in_b == 2);
    CHECK(r.out_a == 2);
    CHECK(r.out_b == 2);
    CHECK(r.kernel_name == "k1");
}

TEST_CASE("identity reaction is accepted") {
    ReactionNetwork net = parse_network(
        "kernel k1 = constant(rate=1)\n"
        "S1 + S1 -> S1 + S1 @ k1\n");
    const Reaction& r = net.reactions()[0];
    CHECK(r.in_a == 1);
    CHECK(r.in_b == 1);
    CHECK(r.out_a == 1);
    CHECK(r.out_b == 1);
}

TEST_CASE("non-bimolecular input is rejected with position info") {
    try {
        parse_network("kernel k1 = constant(rate=1)\nS1 -> S2 @ k1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("non-bimolecular") != std::string::npos);
    }
}

TEST_CASE("unknown kernel reference is rejected") {
    CHECK_THROWS_WITH_AS(parse_network("S1 + S2 -> S2 + S2 @ nope\n"),
                         doctest::Contains("unknown kernel"), ParseError);
}

TEST_CASE("syntax errors carry the line number") {
    try {
        parse_network("kernel k1 = constant(rate=1)\n\nS1 + S2 -> S2 + @ k1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("duplicate reactions are rejected") {
    CHECK_THROWS_WITH_AS(parse_network("kernel k1 = constant(rate=1)\n"
                                       "S1 + S2 -> S2 + S2 @ k1\n"
                                       "S2 + S1 -> S2 + S2 @ k1\n"),
                         doctest::Contains("duplicate"), ParseError);
}

TEST_CASE("pairs normalize to ascending order however written") {
    ReactionNetwork net = parse_network(
        "species: A, B, C\n"
        "kernel k = tophat(radius=0.2, rate=3)\n"
        "C + A -> C + B @ k\n");
    const Reaction& r = net.reactions()[0];
    CHECK(r.in_a == 1);   // A
    CHECK(r.in_b == 3);   // C
    CHECK(r.out_a == 2);  // B
    CHECK(r.out_b == 3);  // C
}

TEST_CASE("species index by first appearance, declared names first") {
    ReactionNetwork net = parse_network(
        "species: X, Y\n"
        "kernel k = constant(rate=1)\n"
        "Z + X -> Z + Y @ k\n");
    CHECK(net.species_names() == std::vector<std::string>{"X", "Y", "Z"});
}

TEST_CASE("pretty-print round trip is exact") {
    const char* text =
        "species: S1, S2, S3\n"
        "kernel ka = tophat(radius=0.25, rate=5)\n"
        "kernel kb = gaussian(width=0.1, rate=2.5)\n"
        "S1 + S2 -> S2 + S2 @ ka\n"
        "S3 + S1 -> S2 + S3 @ kb\n"
        "S3 + S3 -> S1 + S2 @ ka\n";
    ReactionNetwork net = parse_network(text);
    ReactionNetwork again = parse_network(pretty_print(net));
    CHECK(net == again);
    CHECK(pretty_print(net) == pretty_print(again));
}

TEST_CASE("closure of the irreversible two-species network") {
    ReactionNetwork net = parse_network(kSpecial);
    CHECK(closure(net, {1, 2}) == std::set<int>{1, 2});
    CHECK(closure(net, {1}) == std::set<int>{1});
    CHECK(closure(net, {}) == std::set<int>{});
}

TEST_CASE("closure is monotone and idempotent") {
    ReactionNetwork net = parse_network(
        "kernel k = constant(rate=1)\n"
        "S1 + S2 -> S3 + S3 @ k\n"
        "S3 + S3 -> S4 + S4 @ k\n"
        "S4 + S1 -> S5 + S5 @ k\n");
    std::set<int> all = {1, 2, 3, 4, 5};
    std::vector<std::set<int>> seeds = {{}, {1}, {2}, {1, 2}, {3}, {1, 3}, {2, 4}, all};
    for (const auto& v0 : seeds) {
        auto c = closure(net, v0);
        CHECK(std::includes(c.begin(), c.end(), v0.begin(), v0.end()));
        CHECK(closure(net, c) == c);  // fixed point
        for (const auto& bigger : seeds) {
            if (std::includes(bigger.begin(), bigger.end(), v0.begin(), v0.end())) {
                auto cb = closure(net, bigger);
                CHECK(std::includes(cb.begin(), cb.end(), c.begin(), c.end()));
            }
        }
    }
    CHECK(closure(net, {1, 2}) == all);
}

TEST_CASE("is_propagating inspects initial masses") {
    ReactionNetwork net = parse_network(kSpecial);
    CHECK(is_propagating(net, uniform_field(1, 16, {0.5, 0.5})));
    CHECK_FALSE(is_propagating(net, uniform_field(1, 16, {1.0, 0.0})));

    ReactionNetwork no_reactions = parse_network("species: S1, S2\nkernel k = constant(rate=1)\n");
    CHECK(is_propagating(no_reactions, uniform_field(1, 16, {0.5, 0.5})));

    CHECK_THROWS(is_propagating(net, uniform_field(1, 16, {1.0})));
}

TEST_CASE("grid noise below 1e-12 does not enter V0") {
    ReactionNetwork net = parse_network(kSpecial);
    DensityField f = uniform_field(1, 16, {1.0, 0.0});
    f.grid(2)[3] = 1e-14;  // total mass 1e-14/16, below threshold
    CHECK_FALSE(is_propagating(net, f));
}
