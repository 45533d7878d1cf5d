#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/functionals.hpp"
#include "stablab/point_process.hpp"

namespace stablab {

/// Random weighted point measure: one atom per configuration point inside the
/// domain, carrying its rescaled score as weight.
struct WeightedMeasure {
    int dim = 0;
    std::vector<double> positions;  // flat, row major
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    std::span<const double> position(std::size_t i) const {
        return {positions.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// Bounded test function on the domain: a constant, a box indicator, or a
/// linear form sum_a coeffs[a] * x[a].
struct TestFunction {
    enum class Kind { Constant, BoxIndicator, Linear };
    Kind kind = Kind::Constant;
    double c = 1.0;
    std::vector<double> box_lo, box_hi;
    std::vector<double> coeffs;

    static TestFunction constant(double v) {
        TestFunction f;
        f.kind = Kind::Constant;
        f.c = v;
        return f;
    }
    static TestFunction box(std::vector<double> lo, std::vector<double> hi) {
        if (lo.size() != hi.size() || lo.empty()) throw Error("TestFunction::box: bad bounds");
        TestFunction f;
        f.kind = Kind::BoxIndicator;
        f.box_lo = std::move(lo);
        f.box_hi = std::move(hi);
        return f;
    }
    static TestFunction linear(std::vector<double> coeffs) {
        if (coeffs.empty()) throw Error("TestFunction::linear: empty coefficients");
        TestFunction f;
        f.kind = Kind::Linear;
        f.coeffs = std::move(coeffs);
        return f;
    }

    double operator()(std::span<const double> x) const {
        switch (kind) {
            case Kind::Constant: return c;
            case Kind::BoxIndicator:
                for (std::size_t a = 0; a < box_lo.size(); ++a)
                    if (x[a] < box_lo[a] || x[a] > box_hi[a]) return 0.0;
                return 1.0;
            case Kind::Linear: {
                double s = 0.0;
                for (std::size_t a = 0; a < coeffs.size(); ++a) s += coeffs[a] * x[a];
                return s;
            }
        }
        return 0.0;
    }

    /// Supremum of |f| over the domain box.
    double sup_bound(const Domain& domain) const {
        switch (kind) {
            case Kind::Constant: return std::fabs(c);
            case Kind::BoxIndicator: return 1.0;
            case Kind::Linear: {
                // extreme of a linear form over a box: pick the worse corner
                // per axis for each sign
                double hi = 0.0, lo = 0.0;
                for (std::size_t a = 0; a < coeffs.size(); ++a) {
                    const double v1 = coeffs[a] * domain.lo()[a];
                    const double v2 = coeffs[a] * domain.hi()[a];
                    hi += std::max(v1, v2);
                    lo += std::min(v1, v2);
                }
                return std::max(std::fabs(hi), std::fabs(lo));
            }
        }
        return 0.0;
    }
};

/// Builds mu_lambda: atoms at the configuration points lying in the domain,
/// weighted by xi_lambda evaluated in the full configuration.
inline WeightedMeasure build_measure(const FunctionalDescriptor& desc, double lambda,
                                     const MarkedConfiguration& config, const Domain& domain) {
    WeightedMeasure mu;
    mu.dim = config.dim();
    if (config.size() == 0) return mu;
    const XiValue xi = xi_lambda_all(desc, lambda, config);
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto x = config.position(i);
        if (!domain.contains(x)) continue;
        if (!std::isfinite(xi.values[i]))
            throw Error("build_measure: non-finite weight at atom " + std::to_string(i));
        mu.positions.insert(mu.positions.end(), x.begin(), x.end());
        mu.weights.push_back(xi.values[i]);
    }
    return mu;
}

/// <f, mu> as the exact finite sum over atoms.
inline double integrate(const WeightedMeasure& mu, const TestFunction& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += f(mu.position(i)) * mu.weights[i];
    return s;
}

/// CSV export with columns x_1..x_d,weight.
inline void write_measure_csv(std::ostream& os, const WeightedMeasure& mu) {
    for (int a = 0; a < mu.dim; ++a) os << "x_" << (a + 1) << ",";
    os << "weight\n";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto p = mu.position(i);
        for (int a = 0; a < mu.dim; ++a) os << detail::format_double(p[a]) << ",";
        os << detail::format_double(mu.weights[i]) << "\n";
    }
}

}  // namespace stablab
