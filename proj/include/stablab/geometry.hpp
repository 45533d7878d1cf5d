#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/neighbor_index.hpp"

namespace stablab {

inline constexpr int kDefaultIndependenceCap = 40;

/// Geometric graph G(X, r): undirected edge {i, j} iff |x_i - x_j| <= r
/// (closed rule), no self loops, no duplicates.
struct GeometricGraph {
    int n = 0;
    int dim = 0;
    double r = 0.0;
    std::vector<std::pair<int, int>> edges;  // i < j
    std::vector<std::vector<int>> adj;
};

inline GeometricGraph build_geometric_graph(int dim, std::span<const double> coords, double r) {
    if (!(r > 0.0)) throw Error("build_geometric_graph: radius must be positive");
    GeometricGraph g;
    g.dim = dim;
    g.r = r;
    NeighborIndex index(dim, coords);
    g.n = index.size();
    g.adj.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        for (int j : index.within_radius(index.point(i), r, i)) {
            if (j > i) {
                g.edges.emplace_back(i, j);
                g.adj[i].push_back(j);
                g.adj[j].push_back(i);
            }
        }
    }
    for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

/// Connected components as a partition of the vertex set. Each component is
/// sorted by vertex index; components are ordered by smallest member.
inline std::vector<std::vector<int>> components(const GeometricGraph& g) {
    std::vector<int> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> rank(g.n, 0);
    auto find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (const auto& [a, b] : g.edges) {
        int ra = find(a), rb = find(b);
        if (ra == rb) continue;
        if (rank[ra] < rank[rb]) std::swap(ra, rb);
        parent[rb] = ra;
        if (rank[ra] == rank[rb]) ++rank[ra];
    }
    std::vector<std::vector<int>> groups(g.n);
    for (int v = 0; v < g.n; ++v) groups[find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& grp : groups)
        if (!grp.empty()) out.push_back(std::move(grp));
    // members were pushed in index order; order components by smallest member
    std::sort(out.begin(), out.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
    return out;
}

namespace detail {

// Exact maximum independent set on <= 64 vertices: branch and bound with a
// greedy incumbent and a greedy clique-cover upper bound.
class MisSolver {
public:
    explicit MisSolver(const std::vector<std::uint64_t>& adj) : adj_(adj), m_(static_cast<int>(adj.size())) {}

    int solve() {
        best_ = greedy_lower(full_mask());
        search(full_mask(), 0);
        return best_;
    }

private:
    std::uint64_t full_mask() const {
        return m_ == 64 ? ~0ULL : ((1ULL << m_) - 1);
    }

    int greedy_lower(std::uint64_t cand) const {
        int count = 0;
        while (cand) {
            // take the candidate of minimum degree within cand
            std::uint64_t rest = cand;
            int pick = -1, pick_deg = 65;
            while (rest) {
                const int v = std::countr_zero(rest);
                rest &= rest - 1;
                const int deg = std::popcount(adj_[v] & cand);
                if (deg < pick_deg) {
                    pick_deg = deg;
                    pick = v;
                }
            }
            ++count;
            cand &= ~(adj_[pick] | (1ULL << pick));
        }
        return count;
    }

    int clique_cover_ub(std::uint64_t cand) const {
        // Greedy partition of cand into cliques; the clique count bounds the
        // independence number from above.
        int cliques = 0;
        while (cand) {
            const int v = std::countr_zero(cand);
            std::uint64_t clique = 1ULL << v;
            std::uint64_t common = adj_[v] & cand;
            cand &= ~(1ULL << v);
            while (common) {
                const int w = std::countr_zero(common);
                clique |= 1ULL << w;
                cand &= ~(1ULL << w);
                common &= adj_[w] & ~clique;
            }
            ++cliques;
        }
        return cliques;
    }

    void search(std::uint64_t cand, int cur) {
        if (cand == 0) {
            best_ = std::max(best_, cur);
            return;
        }
        if (cur + clique_cover_ub(cand) <= best_) return;
        // Branch on a candidate of maximum degree within cand.
        std::uint64_t rest = cand;
        int pivot = -1, pivot_deg = -1;
        while (rest) {
            const int v = std::countr_zero(rest);
            rest &= rest - 1;
            const int deg = std::popcount(adj_[v] & cand);
            if (deg > pivot_deg) {
                pivot_deg = deg;
                pivot = v;
            }
        }
        if (pivot_deg == 0) {
            // cand is independent
            best_ = std::max(best_, cur + std::popcount(cand));
            return;
        }
        search(cand & ~(adj_[pivot] | (1ULL << pivot)), cur + 1);  // take pivot
        search(cand & ~(1ULL << pivot), cur);                      // skip pivot
    }

    const std::vector<std::uint64_t>& adj_;
    int m_;
    int best_ = 0;
};

}  // namespace detail

/// Exact independence number of one component (given as a vertex list of g).
/// Throws ComponentTooLargeError when the component exceeds the cap; caps
/// above 64 are not supported by the bitset solver.
inline int independence_number(const GeometricGraph& g, const std::vector<int>& component,
                               int cap = kDefaultIndependenceCap) {
    if (cap > 64) throw Error("independence_number: cap above 64 unsupported");
    const int m = static_cast<int>(component.size());
    if (m > cap) throw ComponentTooLargeError(m, cap);
    if (m == 0) return 0;
    std::vector<int> local(g.n, -1);
    for (int t = 0; t < m; ++t) local[component[t]] = t;
    std::vector<std::uint64_t> adj(m, 0);
    for (int t = 0; t < m; ++t)
        for (int nb : g.adj[component[t]])
            if (local[nb] >= 0) adj[t] |= 1ULL << local[nb];
    return detail::MisSolver(adj).solve();
}

/// Independence number of the whole graph: sum over components.
inline int independence_number(const GeometricGraph& g, int cap = kDefaultIndependenceCap) {
    int beta = 0;
    for (const auto& comp : components(g)) beta += independence_number(g, comp, cap);
    return beta;
}

}  // namespace stablab
