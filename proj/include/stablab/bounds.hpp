#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/point_process.hpp"

namespace stablab {

/// Inputs to the Chen-Shao normal approximation bound for dependency-graph
/// sums. D is self-inclusive: maximal vertex degree plus one, so an edgeless
/// graph still has D = 1.
struct ChenShaoInput {
    double q = 3.0;      // in (2, 3]
    long long D = 1;     // self-inclusive degree bound, >= 1
    long long V = 1;     // vertex count, >= 1
    double theta = 1.0;  // uniform q-norm bound, > 0

    void validate() const {
        if (!(q > 2.0 && q <= 3.0)) throw Error("ChenShaoInput: q must lie in (2, 3]");
        if (D < 1) throw Error("ChenShaoInput: D must be >= 1");
        if (V < 1) throw Error("ChenShaoInput: V must be >= 1");
        if (!(theta > 0.0)) throw Error("ChenShaoInput: theta must be positive");
    }

    bool operator==(const ChenShaoInput&) const = default;
};

/// 75 * D^{5(q-1)} * V * theta^q.
inline double chen_shao_bound(const ChenShaoInput& in) {
    in.validate();
    return 75.0 * std::pow(static_cast<double>(in.D), 5.0 * (in.q - 1.0)) *
           static_cast<double>(in.V) * std::pow(in.theta, in.q);
}

/// Proximity graph over partition cubes: edge when the Euclidean set distance
/// inf{|x-y| : x in Q_i, y in Q_j} is at most twice the cube side. Cubes
/// whose side-length neighborhoods intersect are always adjacent, so
/// non-adjacent cubes have disjoint neighborhoods.
struct DependencyGraph {
    double threshold = 0.0;  // 2 * side
    int max_degree = 0;      // raw graph degree
    std::vector<std::vector<int>> adj;

    /// Self-inclusive bound for the Chen-Shao formula.
    long long degree_bound() const { return static_cast<long long>(max_degree) + 1; }
};

namespace detail {

// Index offsets Delta with sum_a max(0, |Delta_a| - 1)^2 <= 4; offsets beyond
// 3 per axis can never qualify.
inline std::vector<std::vector<int>> dependency_offsets(int d) {
    std::vector<std::vector<int>> out;
    std::vector<int> delta(d, -3);
    for (;;) {
        long long g2 = 0;
        bool zero = true;
        for (int a = 0; a < d; ++a) {
            if (delta[a] != 0) zero = false;
            const long long g = std::max(0, std::abs(delta[a]) - 1);
            g2 += g * g;
        }
        if (!zero && g2 <= 4) out.push_back(delta);
        int a = d - 1;
        while (a >= 0 && ++delta[a] > 3) --a;
        if (a < 0) break;
        for (int b = a + 1; b < d; ++b) delta[b] = -3;
    }
    return out;
}

}  // namespace detail

inline DependencyGraph build_dependency_graph(const CubePartition& part) {
    DependencyGraph g;
    g.threshold = 2.0 * part.side;
    g.adj.resize(part.cubes.size());
    const auto offsets = detail::dependency_offsets(part.dim);
    std::vector<int> probe(part.dim);
    for (std::size_t i = 0; i < part.cubes.size(); ++i) {
        for (const auto& delta : offsets) {
            for (int a = 0; a < part.dim; ++a) probe[a] = part.cubes[i].index[a] + delta[a];
            const auto it = part.ordinal.find(probe);
            if (it != part.ordinal.end()) g.adj[i].push_back(it->second);
        }
        std::sort(g.adj[i].begin(), g.adj[i].end());
        g.max_degree = std::max(g.max_degree, static_cast<int>(g.adj[i].size()));
    }
    return g;
}

/// Cube scale for exponentially decaying radius tails: alpha * log(lambda).
inline double rho_for_exponential(double lambda, double alpha) {
    if (!(lambda >= 2.0)) throw Error("rho_for_exponential: lambda must be >= 2");
    if (!(alpha > 0.0)) throw Error("rho_for_exponential: alpha must be positive");
    return alpha * std::log(lambda);
}

/// Cube scale for polynomially decaying tails of order gamma: rho = lambda^a
/// with a = 25 p / (p gamma - 6 d). The product a * (gamma/6 - d/p) equals
/// 25/6 identically; it is returned as a cross check.
struct RhoPolynomial {
    double a = 0.0;
    double rho = 0.0;
    double identity_check = 0.0;  // a * (gamma/6 - d/p), must equal 25/6
};

inline RhoPolynomial rho_for_polynomial(double lambda, double p, double gamma, int d) {
    if (!(lambda >= 2.0)) throw Error("rho_for_polynomial: lambda must be >= 2");
    if (!(p > 0.0)) throw Error("rho_for_polynomial: p must be positive");
    if (!(p * gamma > 6.0 * d)) throw Error("rho_for_polynomial: requires p * gamma > 6 d");
    RhoPolynomial out;
    out.a = 25.0 * p / (p * gamma - 6.0 * d);
    out.rho = std::pow(lambda, out.a);
    out.identity_check = out.a * (gamma / 6.0 - static_cast<double>(d) / p);
    return out;
}

struct RateParameters {
    int d = 1;
    double p = 4.0;
    double q = 3.0;
    double gamma = 0.0;
    double lambda = 2.0;
    double variance = 1.0;
};

/// Kolmogorov-distance bound under exponential stabilization:
/// C * (log lambda)^{d q} * lambda * variance^{-q/2}.
inline double rate_bound_exponential(const RateParameters& rp, double C) {
    if (!(rp.lambda >= 2.0)) throw Error("rate_bound_exponential: lambda must be >= 2");
    if (!(rp.variance > 0.0)) throw Error("rate_bound_exponential: variance must be positive");
    if (!(rp.q > 2.0 && rp.q <= 3.0)) throw Error("rate_bound_exponential: q must lie in (2, 3]");
    return C * std::pow(std::log(rp.lambda), rp.d * rp.q) * rp.lambda *
           std::pow(rp.variance, -rp.q / 2.0);
}

/// Rate exponent under polynomial stabilization of order gamma:
/// (150 p d + 6 d - p gamma) / (2 (p gamma - 6 d)); negative whenever
/// gamma > d (150 + 6/p).
inline double rate_exponent_polynomial(double p, double gamma, int d) {
    if (!(p > 3.0)) throw Error("rate_exponent_polynomial: p must exceed 3");
    const double gamma_min = d * (150.0 + 6.0 / p);
    if (!(gamma > gamma_min))
        throw Error("rate_exponent_polynomial: gamma must exceed d(150 + 6/p) = " +
                    std::to_string(gamma_min));
    return (150.0 * p * d + 6.0 * d - p * gamma) / (2.0 * (p * gamma - 6.0 * d));
}

}  // namespace stablab
