#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "oracles.hpp"
#include "stablab/neighbor_index.hpp"
#include "stablab/rng.hpp"

using namespace stablab;

TEST_CASE("k_nearest on the line {0, 1, 3}") {
    const std::vector<double> xs = {0.0, 1.0, 3.0};
    NeighborIndex index(1, xs);
    REQUIRE(index.k_nearest(2, 1) == std::vector<int>{1});
    REQUIRE(index.k_nearest(0, 2) == std::vector<int>{1, 2});
    REQUIRE_THROWS_AS(index.k_nearest(0, 3), Error);
}

TEST_CASE("distance ties break toward the smaller index") {
    // four points at equal distance from the query point
    const std::vector<double> xs = {0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0};
    NeighborIndex index(2, xs);
    REQUIRE(index.k_nearest(0, 2) == std::vector<int>{1, 2});
    REQUIRE(index.k_nearest(0, 3) == std::vector<int>{1, 2, 3});
}

TEST_CASE("within_radius uses the closed rule") {
    const std::vector<double> xs = {0.0, 1.0, 2.0, 3.5};
    NeighborIndex index(1, xs);
    const std::vector<double> q = {0.0};
    REQUIRE(index.within_radius(q, 2.0) == std::vector<int>{0, 1, 2});
    REQUIRE(index.within_radius(q, 2.0, /*exclude=*/0) == std::vector<int>{1, 2});
    REQUIRE(index.within_radius(q, 0.999).size() == 1);
}

TEST_CASE("queries agree exactly with brute force on random instances") {
    Rng rng(314);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_int(3));
        const int n = 2 + static_cast<int>(rng.uniform_int(trial % 20 == 0 ? 499 : 80));
        std::vector<double> xs(static_cast<std::size_t>(n) * d);
        for (auto& x : xs) x = rng.uniform01();
        NeighborIndex index(d, xs);

        const int i = static_cast<int>(rng.uniform_int(n));
        const int k = 1 + static_cast<int>(rng.uniform_int(std::min(n - 1, 8)));
        REQUIRE(index.k_nearest(i, k) == oracles::brute_k_nearest(xs, d, i, k));

        const double r = 0.05 + 0.3 * rng.uniform01();
        std::vector<double> q(d);
        for (auto& v : q) v = rng.uniform01();
        REQUIRE(index.within_radius(q, r) == oracles::brute_within_radius(xs, d, q.data(), r, -1));
    }
}

TEST_CASE("nearest returns index and distance") {
    const std::vector<double> xs = {0.0, 0.0, 3.0, 4.0};
    NeighborIndex index(2, xs);
    const auto [j, dist] = index.nearest(0);
    REQUIRE(j == 1);
    REQUIRE(dist == Catch::Approx(5.0));
}
