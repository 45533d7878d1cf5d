#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stablab/stabilization.hpp"

using namespace stablab;

namespace {

Density unit_square() { return Density::uniform(Domain::unit_cube(2)); }

// config with a probe point appended at the domain center
MarkedConfiguration with_center_probe(double lambda, std::uint64_t seed, double mark = 0.5) {
    const auto pp = sample_poisson(lambda, unit_square(), seed);
    std::vector<double> coords(pp.coords());
    std::vector<double> marks(pp.marks());
    coords.push_back(0.5);
    coords.push_back(0.5);
    marks.push_back(mark);
    return MarkedConfiguration(2, std::move(coords), std::move(marks));
}

}  // namespace

TEST_CASE("radius_at: nn rule equals the scaled nearest distance") {
    // d = 1, lambda = 9: scaling factor 9; points 0 and 1/3 sit 3 apart scaled
    MarkedConfiguration cfg(1, {0.0, 1.0 / 3.0}, {0.2, 0.8});
    const auto rad = radius_at(cfg, 9.0, 0, RadiusRule::nn_distance());
    REQUIRE_FALSE(rad.isolated);
    REQUIRE(rad.value == Catch::Approx(3.0).margin(1e-12));

    MarkedConfiguration lone(1, {0.4}, {0.5});
    const auto iso = radius_at(lone, 9.0, 0, RadiusRule::nn_distance());
    REQUIRE(iso.isolated);
    REQUIRE(std::isinf(iso.value));
}

TEST_CASE("radius_at: component rule") {
    const double b = 0.7;
    // isolated point: empty component extent
    MarkedConfiguration lone(2, {0.5, 0.5}, {0.5});
    const auto iso = radius_at(lone, 4.0, 0, RadiusRule::component_extent(b));
    REQUIRE_FALSE(iso.isolated);
    REQUIRE(iso.value == Catch::Approx(2.0 * b).margin(1e-12));

    // random subcritical instance: radius dominates every member distance
    const auto cfg = with_center_probe(100.0, 21);
    const std::size_t probe = cfg.size() - 1;
    const double lambda = 100.0;
    const auto rad = radius_at(cfg, lambda, probe, RadiusRule::component_extent(b));
    const double scale = std::sqrt(lambda);
    // recompute the component by brute-force BFS on the scaled points
    std::vector<double> scaled(cfg.coords());
    for (auto& x : scaled) x *= scale;
    const auto comps = oracles::bfs_components(oracles::brute_graph_adjacency(scaled, 2, b));
    for (const auto& comp : comps) {
        if (std::find(comp.begin(), comp.end(), static_cast<int>(probe)) == comp.end()) continue;
        for (int v : comp) {
            const double dist = std::sqrt(
                oracles::dist2(&scaled[2 * probe], &scaled[2 * static_cast<std::size_t>(v)], 2));
            REQUIRE(rad.value >= dist - 1e-12);
        }
    }
}

TEST_CASE("verify_stabilization: nn rule protects the two-color score") {
    const auto cfg = with_center_probe(60.0, 77);
    const std::size_t probe = cfg.size() - 1;
    const auto desc = FunctionalDescriptor::two_color(QField::coordinate(0));
    const auto rad = radius_at(cfg, 60.0, probe, RadiusRule::nn_distance());
    const int violations =
        verify_stabilization(desc, 60.0, cfg, probe, rad.value, 1000, 4242, unit_square());
    REQUIRE(violations == 0);
}

TEST_CASE("verify_stabilization: component rule protects the independence ratio") {
    const double b = std::sqrt(0.3);
    const auto cfg = with_center_probe(80.0, 13);
    const std::size_t probe = cfg.size() - 1;
    const auto desc = FunctionalDescriptor::independence_ratio(b);
    const auto rad = radius_at(cfg, 80.0, probe, RadiusRule::component_extent(b));
    const int violations =
        verify_stabilization(desc, 80.0, cfg, probe, rad.value, 1000, 515, unit_square());
    REQUIRE(violations == 0);
}

TEST_CASE("verify_stabilization: halved radius is caught by the negative control") {
    const auto cfg = with_center_probe(60.0, 99, /*mark=*/0.9);
    const std::size_t probe = cfg.size() - 1;
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const auto rad = radius_at(cfg, 60.0, probe, RadiusRule::nn_distance());
    const int violations = verify_stabilization(desc, 60.0, cfg, probe, 0.5 * rad.value, 1000,
                                                2024, unit_square());
    REQUIRE(violations >= 1);
}

TEST_CASE("shipped radius rules only pair with their kinds") {
    const auto nn = RadiusRule::nn_distance();
    const auto comp = RadiusRule::component_extent(0.5);
    const auto probe = RadiusRule::user_probe(1.0);

    validate_radius_rule(FunctionalDescriptor::two_color(QField::constant(0.5)), nn);
    validate_radius_rule(FunctionalDescriptor::knn_indicator(0.2), nn);
    validate_radius_rule(FunctionalDescriptor::knn(1), nn);
    REQUIRE_THROWS_AS(validate_radius_rule(FunctionalDescriptor::knn(2), nn), Error);
    REQUIRE_THROWS_AS(validate_radius_rule(FunctionalDescriptor::voronoi(), nn), Error);

    validate_radius_rule(FunctionalDescriptor::independence_ratio(0.5), comp);
    REQUIRE_THROWS_AS(validate_radius_rule(FunctionalDescriptor::independence_ratio(0.4), comp),
                      Error);
    REQUIRE_THROWS_AS(validate_radius_rule(FunctionalDescriptor::sig_half_degree(), comp), Error);

    // user probes pass for any kind, e.g. the Voronoi score
    validate_radius_rule(FunctionalDescriptor::voronoi(), probe);
    validate_radius_rule(FunctionalDescriptor::sig_half_degree(), probe);
}

TEST_CASE("empirical_tau: small radii give a zero tail") {
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const auto tail = empirical_tau(desc, RadiusRule::user_probe(0.1), {16.0},
                                    ProbeSpec::interior_grid(1), 50, {0.5, 1.0}, 3,
                                    unit_square());
    REQUIRE(tail.tau == std::vector<double>{0.0, 0.0});
}

TEST_CASE("empirical_tau is monotone nonincreasing and has binomial errors") {
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const std::vector<double> ts = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    const auto tail = empirical_tau(desc, RadiusRule::nn_distance(), {64.0, 121.0},
                                    ProbeSpec::interior_grid(2), 400, ts, 11, unit_square());
    for (std::size_t i = 1; i < tail.tau.size(); ++i) REQUIRE(tail.tau[i] <= tail.tau[i - 1]);
    for (std::size_t i = 0; i < tail.tau.size(); ++i)
        REQUIRE(tail.stderr_[i] ==
                Catch::Approx(std::sqrt(tail.tau[i] * (1 - tail.tau[i]) / 400)).margin(1e-12));
}

TEST_CASE("empirical_tau matches the void-probability law for the nn radius") {
    // scaled nearest-distance radius of a unit-intensity process: the tail at
    // t is exp(-pi t^2); checked at interior probes within 4 binomial sigma
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const int reps = 20000;
    const auto tail = empirical_tau(desc, RadiusRule::nn_distance(), {400.0},
                                    ProbeSpec::at({{0.5, 0.5}}), reps, {0.5, 1.0}, 7,
                                    unit_square());
    for (std::size_t i = 0; i < tail.t.size(); ++i) {
        const double expect = std::exp(-M_PI * tail.t[i] * tail.t[i]);
        const double sigma = std::sqrt(expect * (1 - expect) / reps);
        REQUIRE(std::fabs(tail.tau[i] - expect) <= 4.0 * sigma);
    }
}

TEST_CASE("doubling replicates shrinks the standard error by about sqrt(2)") {
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const std::vector<double> ts = {0.45};  // tau near 0.5 keeps the ratio stable
    const auto a = empirical_tau(desc, RadiusRule::nn_distance(), {100.0},
                                 ProbeSpec::at({{0.5, 0.5}}), 4000, ts, 5, unit_square());
    const auto b = empirical_tau(desc, RadiusRule::nn_distance(), {100.0},
                                 ProbeSpec::at({{0.5, 0.5}}), 8000, ts, 5, unit_square());
    const double ratio = a.stderr_[0] / b.stderr_[0];
    REQUIRE(std::fabs(ratio - std::sqrt(2.0)) < 0.1 * std::sqrt(2.0));
}

TEST_CASE("classify_decay on synthetic tails") {
    TailEstimate tail;
    tail.replicates = 1;
    for (int i = 1; i <= 6; ++i) tail.t.push_back(static_cast<double>(i));
    tail.tau.clear();
    for (double t : tail.t) tail.tau.push_back(std::exp(-2.0 * t));
    auto fit = classify_decay(tail);
    REQUIRE(fit.cls == DecayClass::ExponentialConsistent);
    REQUIRE(fit.exp_fit.slope == Catch::Approx(-2.0).margin(0.01));

    tail.tau.clear();
    for (double t : tail.t) tail.tau.push_back(std::pow(t, -4.0));
    fit = classify_decay(tail);
    REQUIRE(fit.cls == DecayClass::Polynomial);
    REQUIRE(fit.gamma == Catch::Approx(4.0).margin(0.01));

    tail.tau.assign(tail.t.size(), 0.0);
    fit = classify_decay(tail);
    REQUIRE(fit.cls == DecayClass::Inconclusive);
}

TEST_CASE("empirical_moment: indicator scores never exceed one") {
    const auto desc = FunctionalDescriptor::two_color(QField::constant(0.5));
    const auto est = empirical_moment(desc, 4.0, {25.0, 49.0}, ProbeSpec::interior_grid(1), 80,
                                      17, unit_square());
    REQUIRE(est.max_estimate <= 1.0 + 1e-12);
    for (const auto& cell : est.cells) REQUIRE(cell.estimate <= 1.0 + 1e-12);
}

TEST_CASE("empirical_moment: knn fourth moment shows no trend in lambda") {
    const auto desc = FunctionalDescriptor::knn(1);
    const std::vector<double> lambdas = {256.0, 512.0, 1024.0, 2048.0, 4096.0};
    const auto est = empirical_moment(desc, 4.0, lambdas, ProbeSpec::at({{0.5, 0.5}}), 120, 23,
                                      unit_square());
    REQUIRE(est.cells.size() == lambdas.size());
    // weighted-regression slope of estimate vs log(lambda) within 3 sigma of 0
    std::vector<double> xs, ys, ses;
    for (const auto& cell : est.cells) {
        xs.push_back(std::log(cell.lambda));
        ys.push_back(cell.estimate);
        ses.push_back(cell.stderr_);
    }
    const double mx = mean(xs);
    double sxx = 0.0;
    for (double x : xs) sxx += (x - mx) * (x - mx);
    double slope = 0.0, slope_var = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = (xs[i] - mx) / sxx;
        slope += w * ys[i];
        slope_var += w * w * ses[i] * ses[i];
    }
    REQUIRE(std::fabs(slope) <= 3.0 * std::sqrt(slope_var));
}
