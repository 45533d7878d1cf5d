#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "stablab/error.hpp"

namespace stablab {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Exact spatial index (kd-tree) over a fixed point list. Queries return the
/// same results as a brute-force scan: distance comparisons are done on
/// squared distances in double precision, and ties are broken by the smaller
/// point index. Radius queries use the closed rule |x - y| <= r.
class NeighborIndex {
public:
    NeighborIndex(int dim, std::span<const double> coords)
        : dim_(dim), coords_(coords.begin(), coords.end()) {
        if (dim_ < 1) throw Error("NeighborIndex: dimension must be positive");
        if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
            throw Error("NeighborIndex: coordinate count not divisible by dimension");
        n_ = static_cast<int>(coords_.size() / static_cast<std::size_t>(dim_));
        perm_.resize(n_);
        std::iota(perm_.begin(), perm_.end(), 0);
        if (n_ > 0) {
            nodes_.reserve(2 * static_cast<std::size_t>(n_) / kLeafSize + 2);
            root_ = build(0, n_);
        }
    }

    int size() const { return n_; }
    int dim() const { return dim_; }

    std::span<const double> point(int i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * dim_,
                static_cast<std::size_t>(dim_)};
    }

    /// k nearest neighbors of point i (excluding i), ordered by (distance,
    /// index). Requires k < size.
    std::vector<int> k_nearest(int i, int k) const {
        return k_nearest_point(point(i), k, i);
    }

    /// k nearest stored points to an arbitrary query location, optionally
    /// excluding one stored index.
    std::vector<int> k_nearest_point(std::span<const double> x, int k, int exclude = -1) const {
        const int available = n_ - (exclude >= 0 ? 1 : 0);
        if (k < 1) throw Error("k_nearest: k must be positive");
        if (k > available)
            throw Error("k_nearest: k = " + std::to_string(k) + " but only " +
                        std::to_string(available) + " candidate points");
        KnnAccumulator acc(k, exclude);
        search_knn(root_, x, acc);
        return acc.finish();
    }

    /// Nearest stored point to point i; returns {index, distance}.
    std::pair<int, double> nearest(int i) const {
        const auto ids = k_nearest(i, 1);
        return {ids[0], std::sqrt(squared_distance(point(i), point(ids[0])))};
    }

    /// All stored points with |x - p| <= r, sorted by index.
    std::vector<int> within_radius(std::span<const double> x, double r, int exclude = -1) const {
        if (!(r >= 0.0)) throw Error("within_radius: negative radius");
        std::vector<int> out;
        search_radius(root_, x, r * r, exclude, out);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static constexpr int kLeafSize = 12;

    struct Node {
        int axis = -1;         // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range in perm_
    };

    struct KnnAccumulator {
        // Keeps the k best (d2, idx) pairs as a max-heap under lexicographic
        // order, so distance ties resolve toward the smaller index.
        explicit KnnAccumulator(int k, int exclude) : k_(k), exclude_(exclude) {}

        bool full() const { return static_cast<int>(heap_.size()) == k_; }
        double worst_d2() const { return heap_.front().first; }

        void offer(double d2, int idx) {
            if (idx == exclude_) return;
            const std::pair<double, int> cand{d2, idx};
            if (!full()) {
                heap_.push_back(cand);
                std::push_heap(heap_.begin(), heap_.end());
            } else if (cand < heap_.front()) {
                std::pop_heap(heap_.begin(), heap_.end());
                heap_.back() = cand;
                std::push_heap(heap_.begin(), heap_.end());
            }
        }

        std::vector<int> finish() {
            std::sort(heap_.begin(), heap_.end());
            std::vector<int> out(heap_.size());
            for (std::size_t i = 0; i < heap_.size(); ++i) out[i] = heap_[i].second;
            return out;
        }

        int k_;
        int exclude_;
        std::vector<std::pair<double, int>> heap_;
    };

    double coord(int i, int axis) const {
        return coords_[static_cast<std::size_t>(i) * dim_ + axis];
    }

    int build(int begin, int end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size()) - 1;
        }
        // Split on the axis of largest extent at the median.
        int axis = 0;
        double best_extent = -1.0;
        for (int a = 0; a < dim_; ++a) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int t = begin; t < end; ++t) {
                const double v = coord(perm_[t], a);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_extent) {
                best_extent = hi - lo;
                axis = a;
            }
        }
        const int mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](int a, int b) {
                             const double va = coord(a, axis), vb = coord(b, axis);
                             return va != vb ? va < vb : a < b;
                         });
        node.axis = axis;
        node.split = coord(perm_[mid], axis);
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    void search_knn(int node_id, std::span<const double> x, KnnAccumulator& acc) const {
        const Node& node = nodes_[node_id];
        if (node.axis < 0) {
            for (int t = node.begin; t < node.end; ++t) {
                const int idx = perm_[t];
                acc.offer(squared_distance(x, point(idx)), idx);
            }
            return;
        }
        const double diff = x[node.axis] - node.split;
        const int near = diff < 0.0 ? node.left : node.right;
        const int far = diff < 0.0 ? node.right : node.left;
        search_knn(near, x, acc);
        // The far subtree can still hold an equally distant point with a
        // smaller index, so prune only on strict inequality.
        if (!acc.full() || diff * diff <= acc.worst_d2()) search_knn(far, x, acc);
    }

    void search_radius(int node_id, std::span<const double> x, double r2, int exclude,
                       std::vector<int>& out) const {
        if (n_ == 0) return;
        const Node& node = nodes_[node_id];
        if (node.axis < 0) {
            for (int t = node.begin; t < node.end; ++t) {
                const int idx = perm_[t];
                if (idx != exclude && squared_distance(x, point(idx)) <= r2) out.push_back(idx);
            }
            return;
        }
        const double diff = x[node.axis] - node.split;
        const int near = diff < 0.0 ? node.left : node.right;
        const int far = diff < 0.0 ? node.right : node.left;
        search_radius(near, x, r2, exclude, out);
        if (diff * diff <= r2) search_radius(far, x, r2, exclude, out);
    }

    int dim_;
    int n_ = 0;
    std::vector<double> coords_;
    std::vector<int> perm_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace stablab
