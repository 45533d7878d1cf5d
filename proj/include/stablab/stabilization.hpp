#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/functionals.hpp"
#include "stablab/geometry.hpp"
#include "stablab/point_process.hpp"
#include "stablab/rng.hpp"
#include "stablab/stats.hpp"

// Radii of stabilization and their empirical verification. The radius R at a
// point x is measured in the coordinates of the scaled configuration
// lambda^{1/d} X, so the spatial ball it controls has radius lambda^{-1/d} R.

namespace stablab {

enum class RadiusRuleKind { NnDistance, ComponentExtentPlus2b, UserProbe };

struct RadiusRule {
    RadiusRuleKind kind = RadiusRuleKind::NnDistance;
    double b = 0.0;      // connection radius for the component rule
    double probe = 0.0;  // fixed user-supplied radius

    static RadiusRule nn_distance() { return {RadiusRuleKind::NnDistance, 0.0, 0.0}; }
    static RadiusRule component_extent(double b) {
        if (!(b > 0.0)) throw Error("RadiusRule: b must be positive");
        return {RadiusRuleKind::ComponentExtentPlus2b, b, 0.0};
    }
    static RadiusRule user_probe(double radius) {
        if (!(radius > 0.0)) throw Error("RadiusRule: probe radius must be positive");
        return {RadiusRuleKind::UserProbe, 0.0, radius};
    }
};

struct StabilizationRadius {
    double value = 0.0;
    bool isolated = false;  // nn rule with no other point: value is +infinity
};

/// The shipped rules are only claimed for the kinds they were derived for:
/// nn-distance for the two-color and nearest-neighbor kinds, component extent
/// for the independence ratio (with the functional's own connection radius).
/// User-supplied probe radii pass for any kind.
inline void validate_radius_rule(const FunctionalDescriptor& desc, const RadiusRule& rule) {
    switch (rule.kind) {
        case RadiusRuleKind::UserProbe:
            return;
        case RadiusRuleKind::NnDistance: {
            const bool ok = desc.kind == FunctionalKind::TwoColorMismatch ||
                            desc.kind == FunctionalKind::KnnDistanceIndicator ||
                            (desc.kind == FunctionalKind::KnnEdgeLength && desc.k == 1);
            if (!ok)
                throw Error(std::string("radius rule nn-distance is not shipped for kind ") +
                            to_string(desc.kind));
            return;
        }
        case RadiusRuleKind::ComponentExtentPlus2b: {
            if (desc.kind != FunctionalKind::IndependenceRatio)
                throw Error(std::string("radius rule component-extent is not shipped for kind ") +
                            to_string(desc.kind));
            if (desc.b && *desc.b != rule.b)
                throw Error("component-extent rule must use the functional's connection radius");
            return;
        }
    }
}

/// Radius of stabilization at config point i under the given rule.
inline StabilizationRadius radius_at(const MarkedConfiguration& config, double lambda,
                                     std::size_t i, const RadiusRule& rule) {
    if (i >= config.size()) throw Error("radius_at: point not in configuration");
    const int d = config.dim();
    const double scale = std::pow(lambda, 1.0 / d);
    switch (rule.kind) {
        case RadiusRuleKind::NnDistance: {
            if (config.size() < 2)
                return {std::numeric_limits<double>::infinity(), true};
            NeighborIndex index(d, config.coords());
            return {scale * index.nearest(static_cast<int>(i)).second, false};
        }
        case RadiusRuleKind::ComponentExtentPlus2b: {
            // component of i in G(scale * X, b): extent from scale * x_i plus 2b
            const std::vector<double> origin(d, 0.0);
            const auto scaled = rescale_about(origin, scale, config);
            const auto g = build_geometric_graph(d, scaled.coords(), rule.b);
            for (const auto& comp : components(g)) {
                if (std::find(comp.begin(), comp.end(), static_cast<int>(i)) == comp.end())
                    continue;
                double extent = 0.0;
                for (int v : comp)
                    extent = std::max(extent, std::sqrt(squared_distance(
                                                  scaled.position(i), scaled.position(v))));
                return {extent + 2.0 * rule.b, false};
            }
            return {2.0 * rule.b, false};
        }
        case RadiusRuleKind::UserProbe:
            return {rule.probe, false};
    }
    throw Error("radius_at: unknown rule");
}

/// Monte Carlo check of the stabilization property: the score at x computed
/// from the configuration inside the ball B(x, lambda^{-1/d} R) must not move
/// when the outside is arbitrarily perturbed. Each trial deletes a random
/// subset of the outside points and adds a fresh Poisson sample restricted
/// outside the ball. Returns the number of trials on which the score changed
/// by more than 1e-12.
///
/// Ball membership carries a 1e-12 relative slack: the radius arrives in
/// scaled units and the lambda^{1/d} round trip must not drop a point that
/// sits exactly on the boundary (the nn rule puts the nearest neighbor there).
inline int verify_stabilization(const FunctionalDescriptor& desc, double lambda,
                                const MarkedConfiguration& config, std::size_t i, double radius,
                                int trials, std::uint64_t seed, const Density& density) {
    if (i >= config.size()) throw Error("verify_stabilization: point not in configuration");
    if (trials < 1) throw Error("verify_stabilization: trials must be >= 1");
    const int d = config.dim();
    const auto x = config.position(i);
    if (std::isinf(radius)) return 0;  // ball covers everything
    const double ball = std::pow(lambda, -1.0 / d) * radius * (1.0 + 1e-12);
    const double ball2 = ball * ball;

    std::vector<std::size_t> inside, outside;
    for (std::size_t j = 0; j < config.size(); ++j) {
        if (squared_distance(x, config.position(j)) <= ball2)
            inside.push_back(j);
        else
            outside.push_back(j);
    }
    const std::size_t pos_of_i =
        static_cast<std::size_t>(std::find(inside.begin(), inside.end(), i) - inside.begin());
    const MarkedConfiguration base = config.subset(inside);
    const double xi0 = xi_lambda_all(desc, lambda, base, /*lenient=*/true).values[pos_of_i];

    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(seed, 0x57ABULL, static_cast<std::uint64_t>(t));
        std::vector<double> coords;
        std::vector<double> marks;
        for (std::size_t j : inside) {
            const auto p = config.position(j);
            coords.insert(coords.end(), p.begin(), p.end());
            marks.push_back(config.mark(j));
        }
        for (std::size_t j : outside) {
            if (!rng.bernoulli(0.5)) continue;
            const auto p = config.position(j);
            coords.insert(coords.end(), p.begin(), p.end());
            marks.push_back(config.mark(j));
        }
        // fresh marked Poisson points restricted strictly outside the ball
        const std::uint64_t extra = rng.poisson(lambda);
        std::vector<double> cand(d);
        for (std::uint64_t e = 0; e < extra; ++e) {
            density.sample_position(rng, cand.data());
            const double u = rng.uniform01();
            if (squared_distance(x, cand) <= ball2) continue;
            coords.insert(coords.end(), cand.begin(), cand.end());
            marks.push_back(u);
        }
        const MarkedConfiguration perturbed(d, std::move(coords), std::move(marks));
        const double xi1 = xi_lambda_all(desc, lambda, perturbed, /*lenient=*/true).values[pos_of_i];
        if (std::fabs(xi1 - xi0) > 1e-12) ++violations;
    }
    return violations;
}

/// Where to probe the radius distribution: an explicit point list or the cell
/// centers of an n-per-axis grid over the domain box.
struct ProbeSpec {
    enum class Kind { Points, InteriorGrid };
    Kind kind = Kind::Points;
    std::vector<std::vector<double>> points;
    int grid_n = 1;

    static ProbeSpec at(std::vector<std::vector<double>> pts) {
        if (pts.empty()) throw Error("ProbeSpec: empty point list");
        ProbeSpec s;
        s.kind = Kind::Points;
        s.points = std::move(pts);
        return s;
    }
    static ProbeSpec interior_grid(int n) {
        if (n < 1) throw Error("ProbeSpec: grid count must be positive");
        ProbeSpec s;
        s.kind = Kind::InteriorGrid;
        s.grid_n = n;
        return s;
    }

    std::vector<std::vector<double>> materialize(const Domain& domain) const {
        if (kind == Kind::Points) return points;
        const int d = domain.dim();
        std::vector<std::vector<double>> out;
        std::vector<int> idx(d, 0);
        for (;;) {
            std::vector<double> p(d);
            for (int a = 0; a < d; ++a) {
                const double w = (domain.hi()[a] - domain.lo()[a]) / grid_n;
                p[a] = domain.lo()[a] + (idx[a] + 0.5) * w;
            }
            out.push_back(std::move(p));
            int a = d - 1;
            while (a >= 0 && ++idx[a] >= grid_n) --a;
            if (a < 0) break;
            for (int b = a + 1; b < d; ++b) idx[b] = 0;
        }
        return out;
    }
};

/// Empirical tail of the stabilization radius, pooled as the per-t maximum
/// over all (lambda, probe point) cells.
struct TailEstimate {
    std::vector<double> t;
    std::vector<double> tau;      // pooled max exceedance fraction, nonincreasing
    std::vector<double> stderr_;  // binomial standard error of the max cell
    std::vector<long> exceed_max; // exceedance count in the max cell
    int replicates = 0;
    std::vector<double> lambdas;                  // metadata: pooled cells
    std::vector<std::vector<double>> probe_points;
    std::vector<std::vector<double>> cell_tau;    // per cell, per t
};

inline TailEstimate empirical_tau(const FunctionalDescriptor& desc, const RadiusRule& rule,
                                  const std::vector<double>& lambdas, const ProbeSpec& probes,
                                  int replicates, const std::vector<double>& tgrid,
                                  std::uint64_t seed, const Density& density) {
    validate_radius_rule(desc, rule);
    if (lambdas.empty() || tgrid.empty()) throw Error("empirical_tau: empty grids");
    if (replicates < 1) throw Error("empirical_tau: zero replicates");
    TailEstimate est;
    est.t = tgrid;
    est.replicates = replicates;
    est.lambdas = lambdas;
    est.probe_points = probes.materialize(density.domain());
    const int d = density.dim();

    std::size_t cell_id = 0;
    for (double lambda : lambdas) {
        for (const auto& probe : est.probe_points) {
            if (probe.size() != static_cast<std::size_t>(d))
                throw Error("empirical_tau: probe dimension mismatch");
            std::vector<long> exceed(tgrid.size(), 0);
            for (int rep = 0; rep < replicates; ++rep) {
                Rng rng = Rng::stream(seed, 0x7A11ULL, cell_id, static_cast<std::uint64_t>(rep));
                const std::uint64_t sample_seed = rng.next_u64();
                const double probe_mark = rng.uniform01();
                const auto pp = sample_poisson(lambda, density, sample_seed);
                std::vector<double> coords(pp.coords());
                std::vector<double> marks(pp.marks());
                coords.insert(coords.end(), probe.begin(), probe.end());
                marks.push_back(probe_mark);
                MarkedConfiguration with_probe(d, std::move(coords), std::move(marks));
                const auto rad = radius_at(with_probe, lambda, with_probe.size() - 1, rule);
                for (std::size_t ti = 0; ti < tgrid.size(); ++ti)
                    if (rad.isolated || rad.value > tgrid[ti]) ++exceed[ti];
            }
            std::vector<double> taus(tgrid.size());
            for (std::size_t ti = 0; ti < tgrid.size(); ++ti)
                taus[ti] = static_cast<double>(exceed[ti]) / replicates;
            est.cell_tau.push_back(std::move(taus));
            ++cell_id;
        }
    }

    est.tau.assign(tgrid.size(), 0.0);
    est.exceed_max.assign(tgrid.size(), 0);
    est.stderr_.assign(tgrid.size(), 0.0);
    for (std::size_t ti = 0; ti < tgrid.size(); ++ti) {
        for (const auto& cell : est.cell_tau) est.tau[ti] = std::max(est.tau[ti], cell[ti]);
        est.exceed_max[ti] = std::lround(est.tau[ti] * replicates);
        est.stderr_[ti] = binomial_stderr(est.tau[ti], replicates);
    }
    return est;
}

enum class DecayClass { ExponentialConsistent, Polynomial, Inconclusive };

struct DecayFit {
    DecayClass cls = DecayClass::Inconclusive;
    double gamma = 0.0;  // fitted order when polynomial
    FitResult exp_fit;   // log tau vs t
    FitResult poly_fit;  // log tau vs log t
    int points_used = 0;
};

/// Classifies the tail decay by comparing a log-linear and a log-log fit,
/// requiring at least 4 positive tail points and fit quality R^2 >= 0.95.
inline DecayFit classify_decay(const TailEstimate& tail) {
    DecayFit out;
    std::vector<double> ts, logtau, logts;
    for (std::size_t i = 0; i < tail.t.size(); ++i) {
        if (tail.tau[i] > 0.0 && tail.t[i] > 0.0) {
            ts.push_back(tail.t[i]);
            logts.push_back(std::log(tail.t[i]));
            logtau.push_back(std::log(tail.tau[i]));
        }
    }
    out.points_used = static_cast<int>(ts.size());
    if (ts.size() < 4) return out;
    out.exp_fit = fit_linear(ts, logtau);
    out.poly_fit = fit_linear(logts, logtau);
    const bool exp_wins = out.exp_fit.r2 >= out.poly_fit.r2;
    const FitResult& best = exp_wins ? out.exp_fit : out.poly_fit;
    if (best.r2 < 0.95 || best.slope >= 0.0) return out;
    if (exp_wins) {
        out.cls = DecayClass::ExponentialConsistent;
    } else {
        out.cls = DecayClass::Polynomial;
        out.gamma = -out.poly_fit.slope;
    }
    return out;
}

/// Monte Carlo moment sup estimate: E|xi_lambda((x,U); P_lambda)|^p per
/// (lambda, probe) cell, reported as the max over cells.
struct MomentEstimate {
    struct Cell {
        double lambda = 0.0;
        std::vector<double> x;
        double estimate = 0.0;
        double stderr_ = 0.0;
    };
    double max_estimate = 0.0;
    double max_stderr = 0.0;
    std::vector<Cell> cells;
};

inline MomentEstimate empirical_moment(const FunctionalDescriptor& desc, double p,
                                       const std::vector<double>& lambdas,
                                       const ProbeSpec& probes, int replicates,
                                       std::uint64_t seed, const Density& density) {
    if (!(p > 0.0)) throw Error("empirical_moment: p must be positive");
    if (lambdas.empty()) throw Error("empirical_moment: empty lambda grid");
    if (replicates < 2) throw Error("empirical_moment: need at least 2 replicates");
    MomentEstimate out;
    const int d = density.dim();
    const auto probe_points = probes.materialize(density.domain());
    std::size_t cell_id = 0;
    for (double lambda : lambdas) {
        for (const auto& probe : probe_points) {
            std::vector<double> vals(replicates);
            for (int rep = 0; rep < replicates; ++rep) {
                Rng rng = Rng::stream(seed, 0x307ULL, cell_id, static_cast<std::uint64_t>(rep));
                const std::uint64_t sample_seed = rng.next_u64();
                const double probe_mark = rng.uniform01();
                const auto pp = sample_poisson(lambda, density, sample_seed);
                std::vector<double> coords(pp.coords());
                std::vector<double> marks(pp.marks());
                coords.insert(coords.end(), probe.begin(), probe.end());
                marks.push_back(probe_mark);
                MarkedConfiguration with_probe(d, std::move(coords), std::move(marks));
                const double xi = xi_lambda_all(desc, lambda, with_probe, /*lenient=*/true)
                                      .values[with_probe.size() - 1];
                vals[rep] = std::pow(std::fabs(xi), p);
            }
            MomentEstimate::Cell cell;
            cell.lambda = lambda;
            cell.x = probe;
            cell.estimate = mean(vals);
            cell.stderr_ = std::sqrt(sample_variance(vals) / replicates);
            if (cell.estimate > out.max_estimate) {
                out.max_estimate = cell.estimate;
                out.max_stderr = cell.stderr_;
            }
            out.cells.push_back(std::move(cell));
            ++cell_id;
        }
    }
    return out;
}

/// CSV export: t, tau_hat, stderr, n.
inline void write_tail_csv(std::ostream& os, const TailEstimate& tail) {
    os << "t,tau_hat,stderr,n\n";
    for (std::size_t i = 0; i < tail.t.size(); ++i)
        os << detail::format_double(tail.t[i]) << "," << detail::format_double(tail.tau[i]) << ","
           << detail::format_double(tail.stderr_[i]) << "," << tail.replicates << "\n";
}

}  // namespace stablab
