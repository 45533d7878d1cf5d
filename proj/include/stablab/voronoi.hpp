#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "stablab/delaunay.hpp"
#include "stablab/error.hpp"
#include "stablab/point_process.hpp"

namespace stablab {

/// Voronoi cell of one generator in the plane. finite_edges lists the finite
/// edges of the unclipped diagram; every such edge appears in exactly the two
/// cells it separates, with identical endpoints. Unbounded cells are flagged;
/// their rays are not materialized.
struct VoronoiCell {
    int generator = 0;
    std::vector<std::array<double, 4>> finite_edges;  // x1, y1, x2, y2
    std::vector<std::array<double, 4>> clipped_edges; // finite edges clipped to the box
    bool has_unbounded = false;

    double finite_length() const {
        double s = 0.0;
        for (const auto& e : finite_edges) s += std::hypot(e[2] - e[0], e[3] - e[1]);
        return s;
    }
};

namespace detail {

// Liang-Barsky style clip of a segment to an axis-aligned box; returns false
// when nothing remains.
inline bool clip_segment_to_box(std::array<double, 4>& seg, const Domain& box) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = seg[2] - seg[0], dy = seg[3] - seg[1];
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {seg[0] - box.lo()[0], box.hi()[0] - seg[0], seg[1] - box.lo()[1],
                         box.hi()[1] - seg[1]};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return false;
            continue;
        }
        const double r = q[k] / p[k];
        if (p[k] < 0.0) {
            if (r > t1) return false;
            t0 = std::max(t0, r);
        } else {
            if (r < t0) return false;
            t1 = std::min(t1, r);
        }
    }
    const std::array<double, 4> out = {seg[0] + t0 * dx, seg[1] + t0 * dy, seg[0] + t1 * dx,
                                       seg[1] + t1 * dy};
    seg = out;
    return true;
}

}  // namespace detail

/// Voronoi cells of >= 2 distinct points in the plane, via Delaunay duality:
/// each interior Delaunay edge contributes the segment between the adjacent
/// circumcenters to both endpoint cells. When clip_box is given, each cell
/// also carries its finite edges clipped to the box.
inline std::vector<VoronoiCell> voronoi_cells(std::span<const double> xy, int n,
                                              const Domain* clip_box = nullptr) {
    if (n < 2) throw Error("voronoi_cells: need at least 2 points");
    Delaunay2D dt(xy, n);
    std::vector<VoronoiCell> cells(n);
    for (int i = 0; i < n; ++i) cells[i].generator = i;
    const auto flags = dt.unbounded_cell_flags();
    for (int i = 0; i < n; ++i) cells[i].has_unbounded = flags[i];
    for (const auto& e : dt.finite_voronoi_edges()) {
        const std::array<double, 4> seg = {e.u[0], e.u[1], e.v[0], e.v[1]};
        cells[e.a].finite_edges.push_back(seg);
        cells[e.b].finite_edges.push_back(seg);
        if (clip_box != nullptr) {
            std::array<double, 4> clipped = seg;
            if (detail::clip_segment_to_box(clipped, *clip_box)) {
                cells[e.a].clipped_edges.push_back(clipped);
                cells[e.b].clipped_edges.push_back(clipped);
            }
        }
    }
    return cells;
}

}  // namespace stablab
