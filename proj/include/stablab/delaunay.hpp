#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "stablab/error.hpp"

// Incremental Delaunay triangulation in the plane (Bowyer-Watson with ghost
// triangles standing in for the outer face). Predicates are evaluated in long
// double with a relative epsilon threshold; near-zero determinants are treated
// as ties and resolved so that insertion order (point index) decides, which
// makes the structure deterministic on degenerate inputs.

namespace stablab {

namespace delaunay_detail {

inline constexpr int kGhost = -1;

// Relative epsilon for predicate sign decisions. long double on x86 carries a
// 64-bit mantissa, so 1e-18 per unit of accumulated magnitude is comfortably
// above rounding noise while far below any genuine desk-scale determinant.
inline constexpr long double kEps = 1e-18L;

struct Pred {
    // sign of cross(b - a, c - a): +1 left turn, -1 right turn, 0 tie
    static int orient(const double* a, const double* b, const double* c) {
        const long double t1 = (static_cast<long double>(b[0]) - a[0]) *
                               (static_cast<long double>(c[1]) - a[1]);
        const long double t2 = (static_cast<long double>(b[1]) - a[1]) *
                               (static_cast<long double>(c[0]) - a[0]);
        const long double det = t1 - t2;
        const long double mag = std::fabs(t1) + std::fabs(t2);
        if (det > kEps * mag) return 1;
        if (det < -kEps * mag) return -1;
        return 0;
    }

    // sign of the incircle determinant for CCW (a,b,c): +1 when p lies
    // strictly inside the circumcircle.
    static int incircle(const double* a, const double* b, const double* c, const double* p) {
        const long double adx = static_cast<long double>(a[0]) - p[0];
        const long double ady = static_cast<long double>(a[1]) - p[1];
        const long double bdx = static_cast<long double>(b[0]) - p[0];
        const long double bdy = static_cast<long double>(b[1]) - p[1];
        const long double cdx = static_cast<long double>(c[0]) - p[0];
        const long double cdy = static_cast<long double>(c[1]) - p[1];
        const long double ad2 = adx * adx + ady * ady;
        const long double bd2 = bdx * bdx + bdy * bdy;
        const long double cd2 = cdx * cdx + cdy * cdy;
        const long double t1 = ad2 * (bdx * cdy - bdy * cdx);
        const long double t2 = bd2 * (adx * cdy - ady * cdx);
        const long double t3 = cd2 * (adx * bdy - ady * bdx);
        const long double det = t1 - t2 + t3;
        const long double mag = std::fabs(t1) + std::fabs(t2) + std::fabs(t3);
        if (det > kEps * mag) return 1;
        if (det < -kEps * mag) return -1;
        return 0;
    }
};

}  // namespace delaunay_detail

class Delaunay2D {
public:
    struct Triangle {
        std::array<int, 3> v;    // vertex ids, kGhost for the outer face
        std::array<int, 3> nbr;  // neighbor across directed edge (v[k] -> v[k+1])
        bool alive = true;
    };

    /// Voronoi edge dual to an interior Delaunay edge {a, b}: the segment
    /// between the circumcenters of the two adjacent triangles.
    struct DualEdge {
        int a, b;  // generator indices, a < b
        std::array<double, 2> u, v;
    };

    Delaunay2D(std::span<const double> xy, int n) : xy_(xy), n_(n) {
        if (n_ < 2) throw Error("Delaunay2D: need at least 2 points");
        build();
    }

    /// True when every input point lies on one line; the triangulation is
    /// then empty and the Voronoi diagram has no finite edges.
    bool degenerate() const { return degenerate_; }

    std::vector<std::array<int, 3>> real_triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_)
            if (t.alive && !is_ghost(t)) out.push_back(t.v);
        return out;
    }

    /// Finite Voronoi edges of the unclipped diagram, one entry per interior
    /// Delaunay edge (cocircular degeneracies may give zero-length entries).
    std::vector<DualEdge> finite_voronoi_edges() const {
        std::vector<DualEdge> out;
        if (degenerate_) return out;
        std::vector<std::array<double, 2>> centers(tris_.size());
        for (std::size_t t = 0; t < tris_.size(); ++t)
            if (tris_[t].alive && !is_ghost(tris_[t])) centers[t] = circumcenter(tris_[t]);
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            const auto& tri = tris_[t];
            if (!tri.alive || is_ghost(tri)) continue;
            for (int k = 0; k < 3; ++k) {
                const int o = tri.nbr[k];
                if (o < 0 || static_cast<std::size_t>(o) <= t) continue;  // dedupe
                if (is_ghost(tris_[o])) continue;                         // unbounded dual
                DualEdge e;
                const int va = tri.v[k], vb = tri.v[(k + 1) % 3];
                e.a = std::min(va, vb);
                e.b = std::max(va, vb);
                e.u = centers[t];
                e.v = centers[o];
                out.push_back(e);
            }
        }
        return out;
    }

    /// True when the generator's Voronoi cell is unbounded (hull vertex).
    std::vector<bool> unbounded_cell_flags() const {
        std::vector<bool> flags(n_, false);
        if (degenerate_) {
            flags.assign(n_, true);
            return flags;
        }
        for (const auto& t : tris_) {
            if (!t.alive || !is_ghost(t)) continue;
            for (int vid : t.v)
                if (vid >= 0) flags[vid] = true;
        }
        return flags;
    }

private:
    using Pred = delaunay_detail::Pred;
    static constexpr int kGhost = delaunay_detail::kGhost;

    const double* pt(int i) const { return xy_.data() + 2 * static_cast<std::size_t>(i); }

    static bool is_ghost(const Triangle& t) {
        return t.v[0] < 0 || t.v[1] < 0 || t.v[2] < 0;
    }

    static int ghost_slot(const Triangle& t) {
        for (int k = 0; k < 3; ++k)
            if (t.v[k] < 0) return k;
        return -1;
    }

    bool in_disk(const Triangle& t, const double* p) const {
        const int g = ghost_slot(t);
        if (g < 0) return Pred::incircle(pt(t.v[0]), pt(t.v[1]), pt(t.v[2]), p) > 0;
        // Ghost (.., a, b) with real directed edge a -> b: the outer region is
        // strictly left of it; points on the open segment also count.
        const int a = t.v[(g + 1) % 3], b = t.v[(g + 2) % 3];
        const int side = Pred::orient(pt(a), pt(b), p);
        if (side > 0) return true;
        if (side < 0) return false;
        const double abx = pt(b)[0] - pt(a)[0], aby = pt(b)[1] - pt(a)[1];
        const double apx = p[0] - pt(a)[0], apy = p[1] - pt(a)[1];
        const double proj = apx * abx + apy * aby;
        const double len2 = abx * abx + aby * aby;
        return proj > 0.0 && proj < len2;
    }

    std::array<double, 2> circumcenter(const Triangle& t) const {
        const double* a = pt(t.v[0]);
        const double* b = pt(t.v[1]);
        const double* c = pt(t.v[2]);
        const long double bax = static_cast<long double>(b[0]) - a[0];
        const long double bay = static_cast<long double>(b[1]) - a[1];
        const long double cax = static_cast<long double>(c[0]) - a[0];
        const long double cay = static_cast<long double>(c[1]) - a[1];
        const long double b2 = bax * bax + bay * bay;
        const long double c2 = cax * cax + cay * cay;
        const long double d = 2.0L * (bax * cay - bay * cax);
        const long double ux = (cay * b2 - bay * c2) / d;
        const long double uy = (bax * c2 - cax * b2) / d;
        return {static_cast<double>(a[0] + ux), static_cast<double>(a[1] + uy)};
    }

    void link(int t, int k, int o) {
        tris_[t].nbr[k] = o;
        if (o >= 0) {
            const int a = tris_[t].v[k], b = tris_[t].v[(k + 1) % 3];
            for (int j = 0; j < 3; ++j)
                if (tris_[o].v[j] == b && tris_[o].v[(j + 1) % 3] == a) {
                    tris_[o].nbr[j] = t;
                    return;
                }
            throw Error("Delaunay2D: adjacency mismatch");
        }
    }

    void build() {
        // Initial triangle: points 0, 1 and the first point completing a
        // non-collinear triple; remaining points inserted in index order.
        int third = -1;
        for (int j = 2; j < n_; ++j)
            if (Pred::orient(pt(0), pt(1), pt(j)) != 0) {
                third = j;
                break;
            }
        if (third < 0) {
            degenerate_ = true;
            return;
        }
        int a = 0, b = 1, c = third;
        if (Pred::orient(pt(a), pt(b), pt(c)) < 0) std::swap(b, c);
        tris_.push_back({{a, b, c}, {-1, -1, -1}, true});
        tris_.push_back({{b, a, kGhost}, {-1, -1, -1}, true});
        tris_.push_back({{c, b, kGhost}, {-1, -1, -1}, true});
        tris_.push_back({{a, c, kGhost}, {-1, -1, -1}, true});
        link(0, 0, 1);
        link(0, 1, 2);
        link(0, 2, 3);
        link(1, 1, 3);  // (a -> ghost) meets (ghost -> a)
        link(1, 2, 2);
        link(2, 2, 3);
        for (int j = 2; j < n_; ++j) {
            if (j == third) continue;
            insert(j);
        }
    }

    void insert(int pid) {
        const double* p = pt(pid);
        // Seed: the in-disk triangle with the largest raw margin.
        int seed = -1;
        long double best = -std::numeric_limits<long double>::infinity();
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (!tris_[t].alive) continue;
            if (!in_disk(tris_[t], p)) continue;
            const long double m = disk_margin(tris_[t], p);
            if (m > best) {
                best = m;
                seed = static_cast<int>(t);
            }
        }
        if (seed < 0) throw Error("Delaunay2D: insertion found no containing disk");

        // Grow the cavity from the seed.
        std::vector<int> cavity;
        std::vector<char> in_cavity(tris_.size(), 0);
        cavity.push_back(seed);
        in_cavity[seed] = 1;
        for (std::size_t head = 0; head < cavity.size(); ++head) {
            const Triangle& t = tris_[cavity[head]];
            for (int k = 0; k < 3; ++k) {
                const int o = t.nbr[k];
                if (o < 0 || in_cavity[o] || !tris_[o].alive) continue;
                if (in_disk(tris_[o], p)) {
                    in_cavity[o] = 1;
                    cavity.push_back(o);
                }
            }
        }
        repair_cavity(cavity, in_cavity, seed, p);

        // Boundary walk: directed edges of cavity triangles whose neighbor is
        // outside the cavity.
        struct BoundaryEdge {
            int x, y;       // directed edge as stored in the cavity triangle
            int outside;    // surviving neighbor (may be -1 only transiently)
        };
        std::vector<BoundaryEdge> boundary;
        for (int t : cavity)
            for (int k = 0; k < 3; ++k) {
                const int o = tris_[t].nbr[k];
                if (o >= 0 && in_cavity[o]) continue;
                boundary.push_back({tris_[t].v[k], tris_[t].v[(k + 1) % 3], o});
            }
        for (int t : cavity) tris_[t].alive = false;

        // Fan: one new triangle (x, y, p) per boundary edge.
        std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;  // directed edge -> (tri, slot)
        std::vector<int> fresh;
        fresh.reserve(boundary.size());
        for (const auto& e : boundary) {
            const int t = static_cast<int>(tris_.size());
            tris_.push_back({{e.x, e.y, pid}, {-1, -1, -1}, true});
            fresh.push_back(t);
            if (e.outside >= 0) link(t, 0, e.outside);
            edge_owner[{e.y, pid}] = {t, 1};
            edge_owner[{pid, e.x}] = {t, 2};
        }
        for (int t : fresh)
            for (int k = 1; k < 3; ++k) {
                const int u = tris_[t].v[k], v = tris_[t].v[(k + 1) % 3];
                const auto it = edge_owner.find({v, u});
                if (it == edge_owner.end()) throw Error("Delaunay2D: open cavity boundary");
                tris_[t].nbr[k] = it->second.first;
            }
    }

    long double disk_margin(const Triangle& t, const double* p) const {
        const int g = ghost_slot(t);
        if (g < 0) {
            const double* a = pt(t.v[0]);
            const double* b = pt(t.v[1]);
            const double* c = pt(t.v[2]);
            const long double adx = static_cast<long double>(a[0]) - p[0];
            const long double ady = static_cast<long double>(a[1]) - p[1];
            const long double bdx = static_cast<long double>(b[0]) - p[0];
            const long double bdy = static_cast<long double>(b[1]) - p[1];
            const long double cdx = static_cast<long double>(c[0]) - p[0];
            const long double cdy = static_cast<long double>(c[1]) - p[1];
            return (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx) -
                   (bdx * bdx + bdy * bdy) * (adx * cdy - ady * cdx) +
                   (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx);
        }
        const int a = t.v[(g + 1) % 3], b = t.v[(g + 2) % 3];
        return (static_cast<long double>(pt(b)[0]) - pt(a)[0]) *
                   (static_cast<long double>(p[1]) - pt(a)[1]) -
               (static_cast<long double>(pt(b)[1]) - pt(a)[1]) *
                   (static_cast<long double>(p[0]) - pt(a)[0]);
    }

    // With thresholded predicates the cavity can occasionally include a
    // triangle whose removal would produce an inverted fan triangle; drop such
    // triangles (and anything they disconnect) before carving.
    void repair_cavity(std::vector<int>& cavity, std::vector<char>& in_cavity, int seed,
                       const double* p) const {
        for (;;) {
            int drop = -1;
            for (int t : cavity) {
                for (int k = 0; k < 3 && drop < 0; ++k) {
                    const int o = tris_[t].nbr[k];
                    if (o >= 0 && in_cavity[o]) continue;
                    const int x = tris_[t].v[k], y = tris_[t].v[(k + 1) % 3];
                    if (x < 0 || y < 0) continue;  // ghost boundary edges are free
                    if (Pred::orient(pt(x), pt(y), p) <= 0) {
                        drop = t;
                        break;
                    }
                }
                if (drop >= 0) break;
            }
            if (drop < 0) return;
            if (drop == seed) throw Error("Delaunay2D: cavity collapsed to seed");
            in_cavity[drop] = 0;
            // Keep only what the seed still reaches.
            std::vector<int> kept;
            std::vector<char> mark(tris_.size(), 0);
            kept.push_back(seed);
            mark[seed] = 1;
            for (std::size_t head = 0; head < kept.size(); ++head)
                for (int k = 0; k < 3; ++k) {
                    const int o = tris_[kept[head]].nbr[k];
                    if (o >= 0 && in_cavity[o] && !mark[o]) {
                        mark[o] = 1;
                        kept.push_back(o);
                    }
                }
            for (int t : cavity) in_cavity[t] = 0;
            for (int t : kept) in_cavity[t] = 1;
            cavity = std::move(kept);
        }
    }

    std::span<const double> xy_;
    int n_;
    bool degenerate_ = false;
    std::vector<Triangle> tris_;
};

}  // namespace stablab
