#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stablab/harness.hpp"

using namespace stablab;

namespace {

ExperimentConfig small_knn_config() {
    ExperimentConfig cfg;
    cfg.descriptor = FunctionalDescriptor::knn(1);
    cfg.density = Density::uniform(Domain::unit_cube(2));
    cfg.f = TestFunction::constant(1.0);
    cfg.lambdas = {32.0, 64.0, 128.0};
    cfg.m = 40;
    cfg.master_seed = 7;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST_CASE("degenerate experiments are flagged, not crashed") {
    ExperimentConfig cfg;
    cfg.descriptor = FunctionalDescriptor::knn(1);
    cfg.density = Density::uniform(Domain::unit_cube(2));
    cfg.f = TestFunction::constant(0.0);  // forces T == 0 identically
    cfg.lambdas = {4.0};
    cfg.m = 2;
    cfg.master_seed = 3;
    const auto result = run_experiment(cfg);
    REQUIRE(result.per_lambda.size() == 1);
    REQUIRE(result.per_lambda[0].variance == 0.0);
    REQUIRE(result.per_lambda[0].degenerate);
    REQUIRE_FALSE(result.fits_valid);
}

TEST_CASE("identical master seeds reproduce the experiment bit for bit") {
    const auto cfg = small_knn_config();
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    REQUIRE(a.per_lambda.size() == b.per_lambda.size());
    for (std::size_t i = 0; i < a.per_lambda.size(); ++i) {
        REQUIRE(a.per_lambda[i].values == b.per_lambda[i].values);
        REQUIRE(a.per_lambda[i].ks == b.per_lambda[i].ks);
    }
}

TEST_CASE("results do not depend on the thread count") {
    auto cfg = small_knn_config();
    cfg.threads = 1;
    const auto serial = run_experiment(cfg);
    cfg.threads = 8;
    const auto parallel = run_experiment(cfg);
    for (std::size_t i = 0; i < serial.per_lambda.size(); ++i)
        REQUIRE(serial.per_lambda[i].values == parallel.per_lambda[i].values);
}

TEST_CASE("replicate values reproduce the seed derivation contract") {
    const auto cfg = small_knn_config();
    const auto result = run_experiment(cfg);
    // recompute one replicate by hand
    const std::size_t li = 1, rep = 5;
    const std::uint64_t seed = derive_stream_seed(cfg.master_seed, li, rep, detail::kExperimentTag);
    const auto pp = sample_poisson(cfg.lambdas[li], cfg.density, seed);
    const auto mu = build_measure(cfg.descriptor, cfg.lambdas[li], pp, cfg.density.domain());
    REQUIRE(result.per_lambda[li].values[rep] == integrate(mu, cfg.f));
}

TEST_CASE("variance grows roughly linearly in lambda for the knn functional") {
    ExperimentConfig cfg = small_knn_config();
    cfg.lambdas = {64.0, 128.0, 256.0, 512.0};
    cfg.m = 300;
    cfg.threads = 0;
    const auto result = run_experiment(cfg);
    REQUIRE(result.fits_valid);
    REQUIRE(result.var_fit.slope > 0.7);
    REQUIRE(result.var_fit.slope < 1.3);
    REQUIRE(result.sigma2_hat > 0.0);
    for (const auto& stats : result.per_lambda) {
        REQUIRE(stats.ks >= 0.0);
        REQUIRE(stats.ks <= 1.0);
        REQUIRE(stats.failed == 0);
    }
}

TEST_CASE("standardized replicate sets have mean 0 and unit sample SD") {
    const auto cfg = small_knn_config();
    const auto result = run_experiment(cfg);
    for (const auto& stats : result.per_lambda) {
        const double sd = std::sqrt(stats.variance);
        std::vector<double> standardized;
        for (double v : stats.values) standardized.push_back((v - stats.mean) / sd);
        REQUIRE(std::fabs(mean(standardized)) < 1e-9);
        REQUIRE(std::fabs(sample_variance(standardized) - 1.0) < 1e-9);
    }
}

TEST_CASE("failures above one percent abort the experiment") {
    ExperimentConfig cfg;
    // every component of a dense graph blows past a cap of 1
    cfg.descriptor = FunctionalDescriptor::independence_ratio(0.9, /*cap=*/1);
    cfg.density = Density::uniform(Domain::unit_cube(2));
    cfg.lambdas = {50.0};
    cfg.m = 10;
    cfg.master_seed = 5;
    REQUIRE_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("partition diagnostics are attached when a rho rule is set") {
    auto cfg = small_knn_config();
    RhoSpec rho;
    rho.kind = RhoSpec::Kind::Exponential;
    rho.alpha = 1.0;
    cfg.rho = rho;
    const auto result = run_experiment(cfg);
    REQUIRE(result.bounds.size() == cfg.lambdas.size());
    for (const auto& diag : result.bounds) {
        REQUIRE(diag.cube_count > 0);
        REQUIRE(diag.max_degree <= 48);
        REQUIRE(diag.degree_bound == diag.max_degree + 1);
        REQUIRE(diag.rate_bound > 0.0);
    }
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_knn_config();
    cfg.lambdas = {64.0, 32.0};
    REQUIRE_THROWS_AS(cfg.validate(), Error);
    cfg = small_knn_config();
    cfg.m = 1;
    REQUIRE_THROWS_AS(cfg.validate(), Error);
    cfg = small_knn_config();
    cfg.lambdas = {1.0};
    REQUIRE_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) REQUIRE(h.load() == 1);
}
