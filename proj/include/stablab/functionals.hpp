#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/geometry.hpp"
#include "stablab/neighbor_index.hpp"
#include "stablab/point_process.hpp"
#include "stablab/voronoi.hpp"

// Per-point scores xi(x; X) for the supported functional families, each with
// its global sum, plus the rescaled form
//   xi_lambda(x; X) = xi(x; x + lambda^{1/d} (X - x)).
// Conventions (fixed for determinism):
//   - the scored point always counts as part of the structure;
//   - nearest-neighbor and k-nearest ties break toward the smaller index;
//   - SIG balls overlap under the closed rule |x - y| <= r_x + r_y;
//   - RSA rejects on strict overlap (distance < 2r), boundary contact packs.

namespace stablab {

enum class FunctionalKind {
    KnnEdgeLength,
    KnnDistanceIndicator,
    TwoColorMismatch,
    VoronoiHalfLength,
    SigHalfDegree,
    SigDegreeIndicator,
    RsaPacking,
    IndependenceRatio,
};

inline const char* to_string(FunctionalKind k) {
    switch (k) {
        case FunctionalKind::KnnEdgeLength: return "knn";
        case FunctionalKind::KnnDistanceIndicator: return "knn-indicator";
        case FunctionalKind::TwoColorMismatch: return "two-color";
        case FunctionalKind::VoronoiHalfLength: return "voronoi";
        case FunctionalKind::SigHalfDegree: return "sig-half-degree";
        case FunctionalKind::SigDegreeIndicator: return "sig-degree-indicator";
        case FunctionalKind::RsaPacking: return "rsa";
        case FunctionalKind::IndependenceRatio: return "independence-ratio";
    }
    return "?";
}

/// Color threshold field q : R^d -> [0,1]. A point with mark u is red when
/// u <= q(x) and green otherwise.
struct QField {
    enum class Kind { Constant, Coordinate, Custom };
    Kind kind = Kind::Constant;
    double value = 0.5;  // Constant
    int axis = 0;        // Coordinate: clamp(x[axis]) to [0,1]
    std::function<double(std::span<const double>)> fn;  // Custom

    static QField constant(double v) {
        QField q;
        q.kind = Kind::Constant;
        q.value = v;
        return q;
    }
    static QField coordinate(int axis) {
        QField q;
        q.kind = Kind::Coordinate;
        q.axis = axis;
        return q;
    }
    static QField custom(std::function<double(std::span<const double>)> f) {
        QField q;
        q.kind = Kind::Custom;
        q.fn = std::move(f);
        return q;
    }

    double operator()(std::span<const double> x) const {
        switch (kind) {
            case Kind::Constant: return value;
            case Kind::Coordinate: return std::clamp(x[axis], 0.0, 1.0);
            case Kind::Custom: return fn(x);
        }
        return 0.0;
    }

    bool red(std::span<const double> x, double mark) const { return mark <= (*this)(x); }
};

/// Identifies one functional family together with its parameters. Exactly the
/// parameters relevant to the kind may be set.
struct FunctionalDescriptor {
    FunctionalKind kind = FunctionalKind::KnnEdgeLength;
    std::optional<int> k;        // knn edge length
    std::optional<double> s;     // knn distance indicator threshold
    std::optional<int> delta;    // SIG degree indicator target
    std::optional<double> b;     // independence ratio connection radius
    std::optional<double> r;     // RSA ball radius
    std::optional<QField> q;     // two-color threshold field
    int independence_cap = kDefaultIndependenceCap;

    static FunctionalDescriptor knn(int k) {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::KnnEdgeLength;
        d.k = k;
        return d;
    }
    static FunctionalDescriptor knn_indicator(double s) {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::KnnDistanceIndicator;
        d.s = s;
        return d;
    }
    static FunctionalDescriptor two_color(QField q) {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::TwoColorMismatch;
        d.q = std::move(q);
        return d;
    }
    static FunctionalDescriptor voronoi() {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::VoronoiHalfLength;
        return d;
    }
    static FunctionalDescriptor sig_half_degree() {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::SigHalfDegree;
        return d;
    }
    static FunctionalDescriptor sig_degree_indicator(int delta) {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::SigDegreeIndicator;
        d.delta = delta;
        return d;
    }
    static FunctionalDescriptor rsa(double r) {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::RsaPacking;
        d.r = r;
        return d;
    }
    static FunctionalDescriptor independence_ratio(double b, int cap = kDefaultIndependenceCap) {
        FunctionalDescriptor d;
        d.kind = FunctionalKind::IndependenceRatio;
        d.b = b;
        d.independence_cap = cap;
        return d;
    }

    void validate() const {
        auto need = [&](bool cond, const char* what) {
            if (!cond)
                throw Error(std::string("FunctionalDescriptor(") + to_string(kind) + "): " + what);
        };
        const bool has_k = k.has_value(), has_s = s.has_value(), has_delta = delta.has_value(),
                   has_b = b.has_value(), has_r = r.has_value(), has_q = q.has_value();
        switch (kind) {
            case FunctionalKind::KnnEdgeLength:
                need(has_k && !has_s && !has_delta && !has_b && !has_r && !has_q,
                     "exactly k must be set");
                need(*k >= 1, "k must be positive");
                break;
            case FunctionalKind::KnnDistanceIndicator:
                need(has_s && !has_k && !has_delta && !has_b && !has_r && !has_q,
                     "exactly s must be set");
                need(*s > 0.0, "s must be positive");
                break;
            case FunctionalKind::TwoColorMismatch:
                need(has_q && !has_k && !has_s && !has_delta && !has_b && !has_r,
                     "exactly q must be set");
                break;
            case FunctionalKind::VoronoiHalfLength:
                need(!has_k && !has_s && !has_delta && !has_b && !has_r && !has_q,
                     "no parameters expected");
                break;
            case FunctionalKind::SigHalfDegree:
                need(!has_k && !has_s && !has_delta && !has_b && !has_r && !has_q,
                     "no parameters expected");
                break;
            case FunctionalKind::SigDegreeIndicator:
                need(has_delta && !has_k && !has_s && !has_b && !has_r && !has_q,
                     "exactly delta must be set");
                need(*delta >= 0, "delta must be nonnegative");
                break;
            case FunctionalKind::RsaPacking:
                need(has_r && !has_k && !has_s && !has_delta && !has_b && !has_q,
                     "exactly r must be set");
                need(*r > 0.0, "r must be positive");
                break;
            case FunctionalKind::IndependenceRatio:
                need(has_b && !has_k && !has_s && !has_delta && !has_r && !has_q,
                     "exactly b must be set");
                need(*b > 0.0, "b must be positive");
                break;
        }
    }
};

/// Per-point values aligned with the configuration order plus their sum.
struct XiValue {
    std::vector<double> values;
    double sum = 0.0;
};

namespace detail {

inline XiValue finish(std::vector<double> values) {
    XiValue out;
    out.sum = std::accumulate(values.begin(), values.end(), 0.0);
    out.values = std::move(values);
    return out;
}

// Undirected k-nearest-neighbors edge set: {i,j} present when j is among the
// k nearest of i or vice versa.
inline std::vector<std::pair<int, int>> kng_edges(const NeighborIndex& index, int k) {
    std::vector<std::pair<int, int>> edges;
    const int n = index.size();
    edges.reserve(static_cast<std::size_t>(n) * k);
    for (int i = 0; i < n; ++i)
        for (int j : index.k_nearest(i, k)) edges.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace detail

/// Half the kNG edge length incident to each point; requires n >= k + 1.
/// The global sum equals the total edge length of the undirected graph.
inline XiValue knn_xi(const MarkedConfiguration& config, int k) {
    const int n = static_cast<int>(config.size());
    if (k < 1) throw Error("knn_xi: k must be positive");
    if (n < k + 1)
        throw Error("knn_xi: need at least k+1 = " + std::to_string(k + 1) + " points, have " +
                    std::to_string(n));
    NeighborIndex index(config.dim(), config.coords());
    std::vector<double> values(n, 0.0);
    for (const auto& [i, j] : detail::kng_edges(index, k)) {
        const double len = std::sqrt(squared_distance(config.position(i), config.position(j)));
        values[i] += 0.5 * len;
        values[j] += 0.5 * len;
    }
    return detail::finish(std::move(values));
}

/// Indicator that the nearest-neighbor distance is strictly below s.
inline XiValue knn_distance_indicator(const MarkedConfiguration& config, double s) {
    const int n = static_cast<int>(config.size());
    if (n < 2) throw Error("knn_distance_indicator: need at least 2 points");
    if (!(s > 0.0)) throw Error("knn_distance_indicator: s must be positive");
    NeighborIndex index(config.dim(), config.coords());
    std::vector<double> values(n, 0.0);
    for (int i = 0; i < n; ++i) values[i] = index.nearest(i).second < s ? 1.0 : 0.0;
    return detail::finish(std::move(values));
}

/// Indicator that a point and its nearest neighbor carry different colors
/// under the threshold field q.
inline XiValue two_color_mismatch(const MarkedConfiguration& config, const QField& q) {
    const int n = static_cast<int>(config.size());
    if (n < 2) throw Error("two_color_mismatch: need at least 2 points");
    NeighborIndex index(config.dim(), config.coords());
    std::vector<double> values(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int j = index.k_nearest(i, 1)[0];
        const bool ri = q.red(config.position(i), config.mark(i));
        const bool rj = q.red(config.position(j), config.mark(j));
        values[i] = ri != rj ? 1.0 : 0.0;
    }
    return detail::finish(std::move(values));
}

/// Half the finite Voronoi edge length of each cell (d = 2 only). The global
/// sum equals the total finite edge length of the diagram.
inline XiValue voronoi_half_length_xi(const MarkedConfiguration& config) {
    if (config.dim() != 2) throw Error("voronoi_half_length_xi: dimension must be 2");
    const int n = static_cast<int>(config.size());
    if (n < 2) throw Error("voronoi_half_length_xi: need at least 2 points");
    const auto cells = voronoi_cells(config.coords(), n);
    std::vector<double> values(n, 0.0);
    for (int i = 0; i < n; ++i) values[i] = 0.5 * cells[i].finite_length();
    return detail::finish(std::move(values));
}

enum class SigMode { HalfDegree, DegreeIndicator };

/// Sphere-of-influence graph scores: half the SIG degree, or the indicator
/// of degree == delta. SIG joins x and y when |x - y| <= r_x + r_y with r_x
/// the nearest-neighbor distance of x.
inline XiValue sig_xi(const MarkedConfiguration& config, SigMode mode, int delta = 0) {
    const int n = static_cast<int>(config.size());
    if (n < 2) throw Error("sig_xi: need at least 2 points");
    if (mode == SigMode::DegreeIndicator && delta < 0)
        throw Error("sig_xi: delta must be nonnegative");
    NeighborIndex index(config.dim(), config.coords());
    std::vector<double> radius(n);
    double rmax = 0.0;
    for (int i = 0; i < n; ++i) {
        radius[i] = index.nearest(i).second;
        rmax = std::max(rmax, radius[i]);
    }
    std::vector<int> degree(n, 0);
    for (int i = 0; i < n; ++i) {
        // any SIG partner of i lies within radius[i] + rmax
        for (int j : index.within_radius(config.position(i), radius[i] + rmax, i)) {
            if (j <= i) continue;
            const double d2 = squared_distance(config.position(i), config.position(j));
            const double reach = radius[i] + radius[j];
            if (d2 <= reach * reach) {
                ++degree[i];
                ++degree[j];
            }
        }
    }
    std::vector<double> values(n, 0.0);
    for (int i = 0; i < n; ++i)
        values[i] = mode == SigMode::HalfDegree ? 0.5 * degree[i]
                                                : (degree[i] == delta ? 1.0 : 0.0);
    return detail::finish(std::move(values));
}

/// Random sequential packing acceptance indicators: marks are arrival times,
/// processed in increasing order; a ball packs unless some already packed
/// center lies strictly closer than 2r.
inline XiValue rsa_packing_xi(const MarkedConfiguration& config, double r) {
    const int n = static_cast<int>(config.size());
    if (!(r > 0.0)) throw Error("rsa_packing_xi: r must be positive");
    const int d = config.dim();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (config.mark(a) != config.mark(b)) return config.mark(a) < config.mark(b);
        return a < b;
    });
    for (int t = 1; t < n; ++t)
        if (config.mark(order[t - 1]) == config.mark(order[t]))
            throw Error("rsa_packing_xi: duplicate arrival marks at indices " +
                        std::to_string(order[t - 1]) + " and " + std::to_string(order[t]));

    // Accepted centers go into a uniform grid with cell side 2r, so each
    // candidate only checks the 3^d surrounding cells.
    const double cell = 2.0 * r;
    const double reject2 = 4.0 * r * r;
    std::map<std::vector<long long>, std::vector<int>> grid;
    std::vector<long long> key(d), probe(d);
    std::vector<double> values(n, 0.0);
    for (int t = 0; t < n; ++t) {
        const int i = order[t];
        const auto x = config.position(i);
        for (int a = 0; a < d; ++a) key[a] = static_cast<long long>(std::floor(x[a] / cell));
        bool blocked = false;
        std::vector<int> offset(d, -1);
        for (;;) {
            for (int a = 0; a < d; ++a) probe[a] = key[a] + offset[a];
            if (const auto it = grid.find(probe); it != grid.end()) {
                for (int j : it->second)
                    if (squared_distance(x, config.position(j)) < reject2) {
                        blocked = true;
                        break;
                    }
            }
            if (blocked) break;
            int a = d - 1;
            while (a >= 0 && ++offset[a] > 1) --a;
            if (a < 0) break;
            for (int b2 = a + 1; b2 < d; ++b2) offset[b2] = -1;
        }
        if (!blocked) {
            values[i] = 1.0;
            grid[key].push_back(i);
        }
    }
    return detail::finish(std::move(values));
}

/// Independence number of the component containing each point in G(X, b),
/// divided by the component size. The global sum is the independence number
/// of the whole graph.
inline XiValue independence_ratio_xi(const MarkedConfiguration& config, double b,
                                     int cap = kDefaultIndependenceCap) {
    const int n = static_cast<int>(config.size());
    const auto g = build_geometric_graph(config.dim(), config.coords(), b);
    std::vector<double> values(n, 0.0);
    for (const auto& comp : components(g)) {
        const int beta = independence_number(g, comp, cap);
        const double ratio = static_cast<double>(beta) / static_cast<double>(comp.size());
        for (int v : comp) values[v] = ratio;
    }
    return detail::finish(std::move(values));
}

namespace detail {

// Kinds whose score commutes with translation of all positions.
inline bool translation_invariant(FunctionalKind kind) {
    return kind != FunctionalKind::TwoColorMismatch;
}

// Unrescaled dispatch. The lenient flag admits configurations that are too
// small for the public contract (used when evaluating a functional inside a
// stabilization ball that contains only the probe point); the score of an
// isolated point is then 0 for neighbor-based kinds.
inline XiValue evaluate_xi_impl(const FunctionalDescriptor& desc,
                                const MarkedConfiguration& config, bool lenient) {
    desc.validate();
    const int n = static_cast<int>(config.size());
    if (lenient && n >= 1) {
        const bool too_small =
            (desc.kind == FunctionalKind::KnnEdgeLength && n < *desc.k + 1) ||
            ((desc.kind == FunctionalKind::KnnDistanceIndicator ||
              desc.kind == FunctionalKind::TwoColorMismatch ||
              desc.kind == FunctionalKind::SigHalfDegree ||
              desc.kind == FunctionalKind::SigDegreeIndicator ||
              desc.kind == FunctionalKind::VoronoiHalfLength) &&
             n < 2);
        if (too_small) {
            XiValue out;
            if (desc.kind == FunctionalKind::SigDegreeIndicator) {
                out.values.assign(n, *desc.delta == 0 ? 1.0 : 0.0);
            } else {
                out.values.assign(n, 0.0);
            }
            out.sum = std::accumulate(out.values.begin(), out.values.end(), 0.0);
            return out;
        }
    }
    switch (desc.kind) {
        case FunctionalKind::KnnEdgeLength: return knn_xi(config, *desc.k);
        case FunctionalKind::KnnDistanceIndicator: return knn_distance_indicator(config, *desc.s);
        case FunctionalKind::TwoColorMismatch: return two_color_mismatch(config, *desc.q);
        case FunctionalKind::VoronoiHalfLength: return voronoi_half_length_xi(config);
        case FunctionalKind::SigHalfDegree: return sig_xi(config, SigMode::HalfDegree);
        case FunctionalKind::SigDegreeIndicator:
            return sig_xi(config, SigMode::DegreeIndicator, *desc.delta);
        case FunctionalKind::RsaPacking: return rsa_packing_xi(config, *desc.r);
        case FunctionalKind::IndependenceRatio:
            return independence_ratio_xi(config, *desc.b, desc.independence_cap);
    }
    throw Error("evaluate_xi: unknown kind");
}

}  // namespace detail

/// Unrescaled per-point scores for any descriptor.
inline XiValue evaluate_xi(const FunctionalDescriptor& desc, const MarkedConfiguration& config) {
    return detail::evaluate_xi_impl(desc, config, /*lenient=*/false);
}

/// All rescaled scores xi_lambda(x; X) in one pass. Translation-invariant
/// kinds reduce to one evaluation on the globally scaled configuration; the
/// two-color kind shares one nearest-neighbor structure and applies the
/// per-point dilation only through the threshold field argument.
inline XiValue xi_lambda_all(const FunctionalDescriptor& desc, double lambda,
                             const MarkedConfiguration& config, bool lenient = false) {
    desc.validate();
    if (!(lambda > 0.0)) throw Error("xi_lambda_all: lambda must be positive");
    const double scale = std::pow(lambda, 1.0 / config.dim());
    if (detail::translation_invariant(desc.kind)) {
        const std::vector<double> origin(config.dim(), 0.0);
        const auto scaled = rescale_about(origin, scale, config);
        return detail::evaluate_xi_impl(desc, scaled, lenient);
    }
    // Two-color: dilation about x fixes x and preserves which point is its
    // nearest neighbor; only the neighbor's position in the q field moves.
    const int n = static_cast<int>(config.size());
    if (n < 2) {
        if (!lenient) throw Error("two_color_mismatch: need at least 2 points");
        XiValue out;
        out.values.assign(n, 0.0);
        out.sum = 0.0;
        return out;
    }
    const QField& q = *desc.q;
    NeighborIndex index(config.dim(), config.coords());
    std::vector<double> values(n, 0.0);
    std::vector<double> moved(config.dim());
    for (int i = 0; i < n; ++i) {
        const int j = index.k_nearest(i, 1)[0];
        const auto xi = config.position(i);
        const auto xj = config.position(j);
        for (int a = 0; a < config.dim(); ++a) moved[a] = xi[a] + scale * (xj[a] - xi[a]);
        const bool ri = q.red(xi, config.mark(i));
        const bool rj = q.red(moved, config.mark(j));
        values[i] = ri != rj ? 1.0 : 0.0;
    }
    return detail::finish(std::move(values));
}

/// xi_lambda at a single member point, by explicit dilation of the whole
/// configuration about that point.
inline double evaluate_rescaled(const FunctionalDescriptor& desc, double lambda,
                                const MarkedConfiguration& config, std::size_t point_index,
                                bool lenient = false) {
    if (point_index >= config.size()) throw Error("evaluate_rescaled: point not in configuration");
    const double scale = std::pow(lambda, 1.0 / config.dim());
    const auto dilated = rescale_about(config.position(point_index), scale, config);
    return detail::evaluate_xi_impl(desc, dilated, lenient).values[point_index];
}

}  // namespace stablab
