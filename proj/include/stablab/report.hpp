#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <string>

#include <json.hpp>

#include "stablab/bounds.hpp"
#include "stablab/config.hpp"
#include "stablab/harness.hpp"
#include "stablab/stabilization.hpp"
#include "stablab/version.hpp"

// Report writers. CSV bodies are deterministic functions of the results so
// that identical seeds reproduce them byte for byte; wall-clock data lives
// only in the JSON manifest.

namespace stablab {

inline void write_raw_csv(std::ostream& os, const ExperimentResult& result) {
    os << "# stablab " << kVersion << "\n";
    os << "lambda,replicate,value,status\n";
    for (const auto& stats : result.per_lambda)
        for (std::size_t rep = 0; rep < stats.values.size(); ++rep)
            os << detail::format_double(stats.lambda) << "," << rep << ","
               << detail::format_double(stats.values[rep]) << "," << stats.status[rep] << "\n";
}

inline void write_var_scaling_csv(std::ostream& os, const ExperimentResult& result) {
    os << "# stablab " << kVersion << "\n";
    os << "lambda,variance,stderr\n";
    for (const auto& stats : result.per_lambda) {
        const int m_ok = static_cast<int>(stats.values.size()) - stats.failed;
        // normal-theory standard error of the sample variance
        const double se = m_ok > 1 ? stats.variance * std::sqrt(2.0 / (m_ok - 1)) : 0.0;
        os << detail::format_double(stats.lambda) << "," << detail::format_double(stats.variance)
           << "," << detail::format_double(se) << "\n";
    }
}

inline void write_ks_csv(std::ostream& os, const ExperimentResult& result) {
    os << "# stablab " << kVersion << "\n";
    os << "lambda,ks,stderr\n";
    for (const auto& stats : result.per_lambda) {
        const int m_ok = static_cast<int>(stats.values.size()) - stats.failed;
        // 90% null quantile scale of the Kolmogorov statistic
        const double se = m_ok > 0 ? 1.22 / std::sqrt(static_cast<double>(m_ok)) : 0.0;
        os << detail::format_double(stats.lambda) << "," << detail::format_double(stats.ks) << ","
           << detail::format_double(se) << "\n";
    }
}

namespace report_detail {

inline std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline nlohmann::json manifest(const std::string& suite, const std::string& config_path,
                               const std::string& out_dir, double wall_ms) {
    return {
        {"suite", suite},          {"config", config_path}, {"out_dir", out_dir},
        {"version", kVersion},     {"wall_ms", wall_ms},    {"timestamp", timestamp_utc()},
    };
}

}  // namespace report_detail

inline nlohmann::json experiment_summary_json(const ExperimentSpec& spec,
                                              const ExperimentResult& result) {
    nlohmann::json per_lambda = nlohmann::json::array();
    for (const auto& stats : result.per_lambda) {
        nlohmann::json entry = {
            {"lambda", stats.lambda},
            {"replicates", stats.values.size()},
            {"failed", stats.failed},
            {"mean", stats.mean},
            {"variance", stats.variance},
            {"degenerate", stats.degenerate},
        };
        if (std::isfinite(stats.ks)) entry["ks"] = stats.ks;
        per_lambda.push_back(entry);
    }
    nlohmann::json j = {
        {"version", kVersion},
        {"config", render_experiment_config(spec)},
        {"seed", result.master_seed},
        {"per_lambda", per_lambda},
    };
    if (result.fits_valid) {
        j["fits"] = {
            {"var_slope", result.var_fit.slope},     {"var_intercept", result.var_fit.intercept},
            {"var_r2", result.var_fit.r2},           {"sigma2_hat", result.sigma2_hat},
            {"ks_slope", result.ks_fit.slope},       {"ks_intercept", result.ks_fit.intercept},
            {"ks_r2", result.ks_fit.r2},
        };
    }
    if (!result.bounds.empty()) {
        nlohmann::json bounds = nlohmann::json::array();
        for (const auto& diag : result.bounds)
            bounds.push_back({
                {"lambda", diag.lambda},
                {"rho", diag.rho},
                {"side", diag.side},
                {"cube_count", diag.cube_count},
                {"max_degree", diag.max_degree},
                {"degree_bound", diag.degree_bound},
                {"rate_bound", diag.rate_bound},
            });
        j["bounds"] = bounds;
    }
    return j;
}

inline nlohmann::json tails_summary_json(const TailsSpec& spec, const TailEstimate& tail,
                                         const DecayFit& fit) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& p : tail.probe_points) cells.push_back(p);
    nlohmann::json j = {
        {"version", kVersion},
        {"config", render_tails_config(spec)},
        {"replicates", tail.replicates},
        {"t", tail.t},
        {"tau_hat", tail.tau},
        {"stderr", tail.stderr_},
        {"lambdas", tail.lambdas},
        {"probe_points", cells},
    };
    const char* cls = fit.cls == DecayClass::ExponentialConsistent ? "exponential-consistent"
                      : fit.cls == DecayClass::Polynomial          ? "polynomial"
                                                                   : "inconclusive";
    j["decay"] = {
        {"class", cls},
        {"points_used", fit.points_used},
        {"exp_slope", fit.exp_fit.slope},
        {"exp_r2", fit.exp_fit.r2},
        {"poly_slope", fit.poly_fit.slope},
        {"poly_r2", fit.poly_fit.r2},
    };
    if (fit.cls == DecayClass::Polynomial) j["decay"]["gamma"] = fit.gamma;
    return j;
}

inline nlohmann::json bounds_summary_json(const BoundsSpec& spec) {
    nlohmann::json j = {{"version", kVersion}};
    if (spec.chen_shao) {
        j["chen_shao"] = chen_shao_bound(*spec.chen_shao);
        j["chen_shao_inputs"] = {{"q", spec.chen_shao->q},
                                 {"D", spec.chen_shao->D},
                                 {"V", spec.chen_shao->V},
                                 {"theta", spec.chen_shao->theta}};
    }
    if (spec.lambda && spec.alpha)
        j["rho_exponential"] = rho_for_exponential(*spec.lambda, *spec.alpha);
    if (spec.lambda && spec.p && spec.gamma && spec.dim) {
        const auto rp = rho_for_polynomial(*spec.lambda, *spec.p, *spec.gamma,
                                           static_cast<int>(*spec.dim));
        j["rho_polynomial"] = {
            {"a", rp.a}, {"rho", rp.rho}, {"identity_check", rp.identity_check}};
    }
    if (spec.lambda && spec.dim && spec.chen_shao && spec.variance) {
        RateParameters params;
        params.d = static_cast<int>(*spec.dim);
        params.q = spec.chen_shao->q;
        params.lambda = *spec.lambda;
        params.variance = *spec.variance;
        j["rate_bound"] = rate_bound_exponential(params, spec.C);
    }
    if (spec.p && spec.gamma && spec.dim)
        j["rate_exponent"] =
            rate_exponent_polynomial(*spec.p, *spec.gamma, static_cast<int>(*spec.dim));
    return j;
}

}  // namespace stablab
