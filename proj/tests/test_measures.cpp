#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "stablab/measures.hpp"

using namespace stablab;

TEST_CASE("empty configuration gives the empty measure") {
    const auto mu = build_measure(FunctionalDescriptor::knn(1), 4.0,
                                  MarkedConfiguration::empty(2), Domain::unit_cube(2));
    REQUIRE(mu.size() == 0);
    REQUIRE(integrate(mu, TestFunction::constant(1.0)) == 0.0);
}

TEST_CASE("pairing with f == 1 reproduces the global functional value") {
    const auto cfg = oracles::random_config(5, 60, 2);
    const double lambda = 60.0;
    for (const auto& desc :
         {FunctionalDescriptor::knn(1), FunctionalDescriptor::independence_ratio(0.6)}) {
        const auto mu = build_measure(desc, lambda, cfg, Domain::unit_cube(2));
        const auto xi = xi_lambda_all(desc, lambda, cfg);
        REQUIRE(integrate(mu, TestFunction::constant(1.0)) ==
                Catch::Approx(xi.sum).epsilon(1e-12));
    }
}

TEST_CASE("atoms carry the two-color scores") {
    MarkedConfiguration two(2, {0.2, 0.2, 0.8, 0.8}, {0.2, 0.9});
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const auto mu = build_measure(desc, 1.0, two, Domain::unit_cube(2));
    REQUIRE(mu.size() == 2);
    REQUIRE(mu.weights[0] == 1.0);
    REQUIRE(mu.weights[1] == 1.0);
}

TEST_CASE("atoms outside the domain are dropped but still shape the scores") {
    MarkedConfiguration cfg(1, {0.5, 0.6, 2.0}, {0.1, 0.2, 0.3});
    const Domain dom(1, {0.0}, {1.0});
    const auto mu = build_measure(FunctionalDescriptor::knn(1), 1.0, cfg, dom);
    REQUIRE(mu.size() == 2);  // the point at 2.0 is outside A
}

TEST_CASE("integrate: constants, boxes, and linear forms") {
    WeightedMeasure mu;
    mu.dim = 2;
    mu.positions = {0.1, 0.2, 0.5, 0.5, 0.9, 0.8};
    mu.weights = {2.0, -1.0, 4.0};

    REQUIRE(integrate(mu, TestFunction::constant(3.0)) == Catch::Approx(3.0 * 5.0));
    // box [0,0.6]^2 contains the first two atoms
    REQUIRE(integrate(mu, TestFunction::box({0.0, 0.0}, {0.6, 0.6})) == Catch::Approx(1.0));
    // f(x) = x_1: 0.1*2 - 0.5 + 0.9*4 = 3.3
    REQUIRE(integrate(mu, TestFunction::linear({1.0, 0.0})) == Catch::Approx(3.3));
}

TEST_CASE("integration is linear and bounded by sup |f| times total mass") {
    const auto cfg = oracles::random_config(17, 40, 2);
    const auto mu = build_measure(FunctionalDescriptor::knn(2), 16.0, cfg, Domain::unit_cube(2));
    const double a = 2.75;
    const auto f1 = TestFunction::linear({1.0, 0.5});
    const auto f2 = TestFunction::constant(0.3);
    // a*f1 evaluated through scaled coefficients
    const auto af1 = TestFunction::linear({a * 1.0, a * 0.5});
    REQUIRE(integrate(mu, af1) == Catch::Approx(a * integrate(mu, f1)).epsilon(1e-12));

    double abs_mass = 0.0;
    for (double w : mu.weights) abs_mass += std::fabs(w);
    const Domain dom = Domain::unit_cube(2);
    for (const auto& f : {f1, f2}) {
        REQUIRE(std::fabs(integrate(mu, f)) <= f.sup_bound(dom) * abs_mass + 1e-12);
    }
}

TEST_CASE("measure CSV export") {
    WeightedMeasure mu;
    mu.dim = 2;
    mu.positions = {0.25, 0.75};
    mu.weights = {1.5};
    std::ostringstream os;
    write_measure_csv(os, mu);
    REQUIRE(os.str() == "x_1,x_2,weight\n0.25,0.75,1.5\n");
}

TEST_CASE("test function sup bounds") {
    const Domain dom(2, {-1.0, 0.0}, {2.0, 1.0});
    REQUIRE(TestFunction::constant(-3.0).sup_bound(dom) == 3.0);
    REQUIRE(TestFunction::box({0, 0}, {1, 1}).sup_bound(dom) == 1.0);
    // f(x) = x_1 - 2 x_2 over [-1,2] x [0,1]: extremes 2 and -3
    REQUIRE(TestFunction::linear({1.0, -2.0}).sup_bound(dom) == Catch::Approx(3.0));
}
