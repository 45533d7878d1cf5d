#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "oracles.hpp"
#include "stablab/geometry.hpp"
#include "stablab/rng.hpp"

using namespace stablab;

TEST_CASE("components: singletons and a path") {
    const std::vector<double> far = {0.0, 10.0, 20.0};
    auto g = build_geometric_graph(1, far, 1.0);
    REQUIRE(g.edges.empty());
    auto comps = components(g);
    REQUIRE(comps.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(comps[i] == std::vector<int>{static_cast<int>(i)});

    const std::vector<double> path = {0.0, 1.0, 2.0};
    g = build_geometric_graph(1, path, 1.0);
    comps = components(g);
    REQUIRE(comps.size() == 1);
    REQUIRE(comps[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("components agree with a BFS oracle on random graphs") {
    Rng rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cfg = oracles::random_config(9000 + trial, 50, 2);
        const double r = 0.08 + 0.08 * rng.uniform01();
        const auto g = build_geometric_graph(2, cfg.coords(), r);
        const auto expect = oracles::bfs_components(oracles::brute_graph_adjacency(cfg.coords(), 2, r));
        REQUIRE(components(g) == expect);
    }
}

TEST_CASE("independence number: triangle, cycle, empty graph") {
    // triangle: three mutually close points
    const std::vector<double> tri = {0.0, 0.0, 0.1, 0.0, 0.0, 0.1};
    auto g = build_geometric_graph(2, tri, 0.5);
    REQUIRE(independence_number(g) == 1);

    // 5-cycle with radius joining only adjacent vertices
    std::vector<double> cyc;
    const double R = 1.0;
    for (int i = 0; i < 5; ++i) {
        cyc.push_back(R * std::cos(2 * M_PI * i / 5));
        cyc.push_back(R * std::sin(2 * M_PI * i / 5));
    }
    const double side = 2 * R * std::sin(M_PI / 5);
    g = build_geometric_graph(2, cyc, side * 1.01);
    REQUIRE(g.edges.size() == 5);
    REQUIRE(independence_number(g) == 2);

    // empty graph on n vertices
    const std::vector<double> spread = {0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
    g = build_geometric_graph(1, spread, 1.0);
    REQUIRE(independence_number(g) == 6);
}

TEST_CASE("independence number is additive over components") {
    // two clusters far apart
    std::vector<double> xs;
    for (double x : {0.0, 0.05, 0.1}) xs.push_back(x);      // triangle-ish cluster
    for (double x : {100.0, 100.05}) xs.push_back(x);        // pair
    const auto g = build_geometric_graph(1, xs, 0.06);
    const auto comps = components(g);
    int total = 0;
    for (const auto& comp : comps) total += independence_number(g, comp);
    REQUIRE(independence_number(g) == total);
}

TEST_CASE("cap violations carry the component size") {
    std::vector<double> xs;
    Rng rng(5);
    for (int i = 0; i < 45; ++i) xs.push_back(rng.uniform01() * 1e-3);
    const auto g = build_geometric_graph(1, xs, 1.0);
    try {
        independence_number(g, /*cap=*/40);
        FAIL("expected ComponentTooLargeError");
    } catch (const ComponentTooLargeError& e) {
        REQUIRE(e.size() == 45);
        REQUIRE(e.cap() == 40);
    }
}

TEST_CASE("branch and bound matches plain recursion on random graphs") {
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 10 + static_cast<int>(rng.uniform_int(21));
        const auto cfg = oracles::random_config(333 + trial, n, 2);
        const double r = 0.1 + 0.2 * rng.uniform01();
        const auto g = build_geometric_graph(2, cfg.coords(), r);
        REQUIRE(independence_number(g, 64) == oracles::plain_mis_graph(cfg.coords(), 2, r));
    }
}

TEST_CASE("geometric graph uses the closed radius rule") {
    const std::vector<double> xs = {0.0, 1.0};
    const auto g = build_geometric_graph(1, xs, 1.0);
    REQUIRE(g.edges.size() == 1);  // |0 - 1| == r joins
}
