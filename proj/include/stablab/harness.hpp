#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "stablab/bounds.hpp"
#include "stablab/error.hpp"
#include "stablab/functionals.hpp"
#include "stablab/measures.hpp"
#include "stablab/point_process.hpp"
#include "stablab/rng.hpp"
#include "stablab/stats.hpp"

// Monte Carlo experiments over a lambda grid: replicate T_lambda = <f, mu>,
// per-lambda statistics, and scaling fits. Every replicate owns an RNG stream
// derived from (master seed, lambda index, replicate index), so results are
// identical for any thread count.

namespace stablab {

/// Runs fn(i) for i in [0, n) on the given number of worker threads (0 means
/// hardware concurrency). Work items are claimed through an atomic counter;
/// callers must make results independent of completion order.
template <typename Fn>
inline void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1)));
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Optional cube-scale rule used for partition diagnostics in reports.
struct RhoSpec {
    enum class Kind { Exponential, Polynomial };
    Kind kind = Kind::Exponential;
    double alpha = 1.0;   // exponential
    double p = 4.0;       // polynomial
    double gamma = 0.0;   // polynomial

    double evaluate(double lambda, int d) const {
        if (kind == Kind::Exponential) return rho_for_exponential(lambda, alpha);
        return rho_for_polynomial(lambda, p, gamma, d).rho;
    }
    bool operator==(const RhoSpec&) const = default;
};

struct ExperimentConfig {
    FunctionalDescriptor descriptor;
    Density density = Density::uniform(Domain::unit_cube(2));
    TestFunction f = TestFunction::constant(1.0);
    std::vector<double> lambdas;
    int m = 2;                    // replicates per lambda
    std::uint64_t master_seed = 1;
    int threads = 0;              // 0 = hardware concurrency
    std::optional<RhoSpec> rho;   // partition diagnostics when present

    void validate() const {
        descriptor.validate();
        if (lambdas.empty()) throw Error("ExperimentConfig: empty lambda grid");
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            if (!(lambdas[i] >= 2.0)) throw Error("ExperimentConfig: lambda must be >= 2");
            if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
                throw Error("ExperimentConfig: lambda grid must be increasing");
        }
        if (m < 2) throw Error("ExperimentConfig: m must be >= 2");
    }
};

struct LambdaStats {
    double lambda = 0.0;
    std::vector<double> values;        // replicate T values, NaN when failed
    std::vector<std::string> status;   // "ok" or "failed: ..."
    int failed = 0;
    double mean = 0.0;
    double variance = 0.0;
    double ks = 0.0;
    bool degenerate = false;  // zero sample variance, KS undefined
};

struct PartitionDiagnostics {
    double lambda = 0.0;
    double rho = 0.0;
    double side = 0.0;
    long long cube_count = 0;
    int max_degree = 0;
    long long degree_bound = 0;   // self-inclusive
    double rate_bound = 0.0;      // exponential-rate bound with C = 1, q = 3
};

struct ExperimentResult {
    std::vector<LambdaStats> per_lambda;
    bool fits_valid = false;
    FitResult var_fit;   // log variance vs log lambda
    FitResult ks_fit;    // log KS vs log lambda
    double sigma2_hat = 0.0;  // exp(variance-fit intercept)
    std::vector<PartitionDiagnostics> bounds;
    std::uint64_t master_seed = 0;
    double wall_ms = 0.0;
};

namespace detail {

inline constexpr std::uint64_t kExperimentTag = 0xE59ULL;

}  // namespace detail

/// Runs the experiment: for each lambda, m replicates of
/// sample -> build measure -> integrate, then statistics and fits.
/// Deterministic given the master seed, for any thread count. Throws when
/// more than 1% of replicates fail.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.master_seed = config.master_seed;
    const std::size_t L = config.lambdas.size();
    const std::size_t total = L * static_cast<std::size_t>(config.m);
    std::vector<double> values(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> status(total);

    parallel_for(total, config.threads, [&](std::size_t idx) {
        const std::size_t li = idx / config.m;
        const std::size_t rep = idx % config.m;
        const double lambda = config.lambdas[li];
        const std::uint64_t seed =
            derive_stream_seed(config.master_seed, li, rep, detail::kExperimentTag);
        try {
            const auto pp = sample_poisson(lambda, config.density, seed);
            const auto mu = build_measure(config.descriptor, lambda, pp, config.density.domain());
            values[idx] = integrate(mu, config.f);
            status[idx] = "ok";
        } catch (const std::exception& e) {
            std::string why = e.what();
            for (char& ch : why)
                if (ch == ',' || ch == '\n') ch = ';';
            status[idx] = "failed: " + why;
        }
    });

    int total_failed = 0;
    for (std::size_t li = 0; li < L; ++li) {
        LambdaStats stats;
        stats.lambda = config.lambdas[li];
        stats.values.assign(values.begin() + li * config.m, values.begin() + (li + 1) * config.m);
        stats.status.assign(status.begin() + li * config.m, status.begin() + (li + 1) * config.m);
        std::vector<double> ok;
        ok.reserve(config.m);
        for (int rep = 0; rep < config.m; ++rep) {
            if (stats.status[rep] == "ok")
                ok.push_back(stats.values[rep]);
            else
                ++stats.failed;
        }
        total_failed += stats.failed;
        if (ok.size() >= 2) {
            stats.mean = mean(ok);
            stats.variance = sample_variance(ok);
            const double sd = std::sqrt(stats.variance);
            if (sd > 1e-15 * std::max(1.0, std::fabs(stats.mean))) {
                std::vector<double> standardized(ok.size());
                for (std::size_t i = 0; i < ok.size(); ++i)
                    standardized[i] = (ok[i] - stats.mean) / sd;
                stats.ks = ks_distance(standardized);
            } else {
                stats.degenerate = true;
                stats.ks = std::numeric_limits<double>::quiet_NaN();
            }
        } else {
            stats.degenerate = true;
            stats.ks = std::numeric_limits<double>::quiet_NaN();
        }
        result.per_lambda.push_back(std::move(stats));
    }
    if (static_cast<double>(total_failed) > 0.01 * static_cast<double>(total))
        throw Error("run_experiment: " + std::to_string(total_failed) + " of " +
                    std::to_string(total) + " replicates failed");

    std::vector<double> ls, vars, kss, ls_ks;
    for (const auto& stats : result.per_lambda) {
        if (!stats.degenerate && stats.variance > 0.0) {
            ls.push_back(stats.lambda);
            vars.push_back(stats.variance);
            if (stats.ks > 0.0) {
                ls_ks.push_back(stats.lambda);
                kss.push_back(stats.ks);
            }
        }
    }
    if (ls.size() >= 3) {
        result.var_fit = fit_scaling(ls, vars);
        result.sigma2_hat = std::exp(result.var_fit.intercept);
        if (ls_ks.size() >= 3) result.ks_fit = fit_scaling(ls_ks, kss);
        result.fits_valid = true;
    }

    if (config.rho.has_value()) {
        for (const auto& stats : result.per_lambda) {
            PartitionDiagnostics diag;
            diag.lambda = stats.lambda;
            diag.rho = config.rho->evaluate(stats.lambda, config.density.dim());
            const auto part = build_cube_partition(stats.lambda, diag.rho, config.density);
            const auto dg = build_dependency_graph(part);
            diag.side = part.side;
            diag.cube_count = part.count();
            diag.max_degree = dg.max_degree;
            diag.degree_bound = dg.degree_bound();
            if (!stats.degenerate && stats.variance > 0.0) {
                RateParameters rp;
                rp.d = config.density.dim();
                rp.q = 3.0;
                rp.lambda = stats.lambda;
                rp.variance = stats.variance;
                diag.rate_bound = rate_bound_exponential(rp, 1.0);
            }
            result.bounds.push_back(diag);
        }
    }
    result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               t_start)
                         .count();
    return result;
}

}  // namespace stablab
