#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/rng.hpp"

namespace stablab {

/// Axis-aligned compact box domain in R^d.
class Domain {
public:
    Domain(int dim, std::vector<double> lo, std::vector<double> hi)
        : dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)) {
        if (dim_ < 1) throw Error("Domain: dimension must be positive");
        if (lo_.size() != static_cast<std::size_t>(dim_) || hi_.size() != lo_.size())
            throw Error("Domain: bound size mismatch");
        for (int a = 0; a < dim_; ++a)
            if (!(hi_[a] > lo_[a])) throw Error("Domain: empty extent on axis " + std::to_string(a));
    }

    static Domain unit_cube(int dim) {
        return Domain(dim, std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
    }

    int dim() const { return dim_; }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }

    bool contains(std::span<const double> x) const {
        for (int a = 0; a < dim_; ++a)
            if (x[a] < lo_[a] || x[a] > hi_[a]) return false;
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= hi_[a] - lo_[a];
        return v;
    }

    double diameter() const {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) s += (hi_[a] - lo_[a]) * (hi_[a] - lo_[a]);
        return std::sqrt(s);
    }

    bool operator==(const Domain& o) const = default;

private:
    int dim_;
    std::vector<double> lo_, hi_;
};

/// Probability density on a compact box. Two kinds are supported so that all
/// cube-mass integrals are exact: uniform on the box, and piecewise constant
/// on a rectangular grid of cells.
class Density {
public:
    enum class Kind { Uniform, Grid };

    static Density uniform(Domain box) {
        Density d(std::move(box));
        d.kind_ = Kind::Uniform;
        d.sup_ = 1.0 / d.box_.volume();
        return d;
    }

    /// cells[a] counts grid cells along axis a; weights are relative cell
    /// masses in row-major order (last axis fastest) and need not be
    /// normalized. At least one weight must be positive, none negative.
    static Density grid(Domain box, std::vector<int> cells, std::vector<double> weights) {
        Density d(std::move(box));
        d.kind_ = Kind::Grid;
        d.cells_ = std::move(cells);
        if (d.cells_.size() != static_cast<std::size_t>(d.box_.dim()))
            throw Error("Density::grid: cell count rank mismatch");
        std::size_t total = 1;
        for (int c : d.cells_) {
            if (c < 1) throw Error("Density::grid: cell counts must be positive");
            total *= static_cast<std::size_t>(c);
        }
        if (weights.size() != total) throw Error("Density::grid: weight count mismatch");
        double wsum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw Error("Density::grid: negative weight");
            wsum += w;
        }
        if (!(wsum > 0.0)) throw Error("Density::grid: all weights zero");

        d.weights_ = std::move(weights);
        const double cellvol = d.cell_volume();
        d.kappa_.resize(d.weights_.size());
        d.cum_mass_.resize(d.weights_.size());
        double cum = 0.0;
        d.sup_ = 0.0;
        for (std::size_t c = 0; c < d.weights_.size(); ++c) {
            const double mass = d.weights_[c] / wsum;
            d.kappa_[c] = mass / cellvol;
            d.sup_ = std::max(d.sup_, d.kappa_[c]);
            cum += mass;
            d.cum_mass_[c] = cum;
        }
        d.cum_mass_.back() = 1.0;
        return d;
    }

    Kind kind() const { return kind_; }
    const Domain& domain() const { return box_; }
    int dim() const { return box_.dim(); }
    double sup() const { return sup_; }

    double evaluate(std::span<const double> x) const {
        if (!box_.contains(x)) return 0.0;
        if (kind_ == Kind::Uniform) return sup_;
        return kappa_[cell_of(x)];
    }

    /// Exact integral of the density over the box [lo, hi].
    double integral_box(std::span<const double> lo, std::span<const double> hi) const {
        const int d = box_.dim();
        if (kind_ == Kind::Uniform) {
            double overlap = 1.0;
            for (int a = 0; a < d; ++a) {
                const double len =
                    std::min(hi[a], box_.hi()[a]) - std::max(lo[a], box_.lo()[a]);
                if (len <= 0.0) return 0.0;
                overlap *= len;
            }
            return overlap * sup_;
        }
        // Piecewise constant: sum kappa * overlap over intersecting grid cells.
        std::vector<int> c_lo(d), c_hi(d);
        for (int a = 0; a < d; ++a) {
            const double w = cell_width(a);
            const double rel_lo = (std::max(lo[a], box_.lo()[a]) - box_.lo()[a]) / w;
            const double rel_hi = (std::min(hi[a], box_.hi()[a]) - box_.lo()[a]) / w;
            if (rel_hi <= rel_lo) return 0.0;
            c_lo[a] = std::max(0, static_cast<int>(std::floor(rel_lo)));
            c_hi[a] = std::min(cells_[a] - 1, static_cast<int>(std::floor(rel_hi)));
            if (static_cast<double>(c_hi[a]) == rel_hi) c_hi[a] -= 1;  // zero-width tail
            if (c_hi[a] < c_lo[a]) return 0.0;
        }
        double total = 0.0;
        std::vector<int> idx(c_lo);
        for (;;) {
            double overlap = 1.0;
            for (int a = 0; a < d; ++a) {
                const double w = cell_width(a);
                const double cell_lo = box_.lo()[a] + idx[a] * w;
                const double cell_hi = cell_lo + w;
                overlap *= std::min(hi[a], cell_hi) - std::max(lo[a], cell_lo);
            }
            if (overlap > 0.0) total += overlap * kappa_[flat_index(idx)];
            int a = d - 1;
            while (a >= 0 && ++idx[a] > c_hi[a]) --a;
            if (a < 0) break;
            for (int b = a + 1; b < d; ++b) idx[b] = c_lo[b];
        }
        return total;
    }

    double total_integral() const {
        return integral_box(box_.lo(), box_.hi());
    }

    /// Draws one position with this density.
    void sample_position(Rng& rng, double* out) const {
        const int d = box_.dim();
        if (kind_ == Kind::Uniform) {
            for (int a = 0; a < d; ++a) out[a] = rng.uniform(box_.lo()[a], box_.hi()[a]);
            return;
        }
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cum_mass_.begin(), cum_mass_.end(), u);
        std::size_t c = static_cast<std::size_t>(it - cum_mass_.begin());
        if (c >= cum_mass_.size()) c = cum_mass_.size() - 1;
        std::vector<int> idx = unflatten(c);
        for (int a = 0; a < d; ++a) {
            const double w = cell_width(a);
            const double cell_lo = box_.lo()[a] + idx[a] * w;
            out[a] = cell_lo + w * rng.uniform01();
        }
    }

    const std::vector<int>& grid_cells() const { return cells_; }

private:
    explicit Density(Domain box) : box_(std::move(box)) {}

    double cell_width(int axis) const {
        return (box_.hi()[axis] - box_.lo()[axis]) / cells_[axis];
    }

    double cell_volume() const {
        double v = box_.volume();
        for (int c : cells_) v /= c;
        return v;
    }

    std::size_t flat_index(const std::vector<int>& idx) const {
        std::size_t f = 0;
        for (int a = 0; a < box_.dim(); ++a) f = f * cells_[a] + idx[a];
        return f;
    }

    std::vector<int> unflatten(std::size_t f) const {
        std::vector<int> idx(box_.dim());
        for (int a = box_.dim() - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(f % cells_[a]);
            f /= cells_[a];
        }
        return idx;
    }

    std::size_t cell_of(std::span<const double> x) const {
        std::vector<int> idx(box_.dim());
        for (int a = 0; a < box_.dim(); ++a) {
            const double w = cell_width(a);
            int i = static_cast<int>(std::floor((x[a] - box_.lo()[a]) / w));
            idx[a] = std::clamp(i, 0, cells_[a] - 1);
        }
        return flat_index(idx);
    }

    Kind kind_ = Kind::Uniform;
    Domain box_;
    double sup_ = 0.0;
    std::vector<int> cells_;
    std::vector<double> weights_;
    std::vector<double> kappa_;
    std::vector<double> cum_mass_;
};

/// A finite marked point set. Positions are stored flat (row major, one row
/// per point); marks live in [0, 1]. Construction validates mark range and
/// position distinctness, and iteration order is the construction order.
class MarkedConfiguration {
public:
    MarkedConfiguration(int dim, std::vector<double> coords, std::vector<double> marks)
        : dim_(dim), coords_(std::move(coords)), marks_(std::move(marks)) {
        if (dim_ < 1) throw Error("MarkedConfiguration: dimension must be positive");
        if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
            throw Error("MarkedConfiguration: coordinate count not divisible by dimension");
        if (marks_.size() * static_cast<std::size_t>(dim_) != coords_.size())
            throw Error("MarkedConfiguration: mark count mismatch");
        for (double u : marks_)
            if (!(u >= 0.0 && u <= 1.0)) throw Error("MarkedConfiguration: mark outside [0,1]");
        check_distinct();
    }

    static MarkedConfiguration empty(int dim) { return MarkedConfiguration(dim, {}, {}); }

    int dim() const { return dim_; }
    std::size_t size() const { return marks_.size(); }

    std::span<const double> position(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }

    double mark(std::size_t i) const { return marks_[i]; }
    const std::vector<double>& coords() const { return coords_; }
    const std::vector<double>& marks() const { return marks_; }

    /// Configuration restricted to the given point indices, order preserved.
    MarkedConfiguration subset(const std::vector<std::size_t>& keep) const {
        std::vector<double> c, m;
        c.reserve(keep.size() * dim_);
        m.reserve(keep.size());
        for (std::size_t i : keep) {
            const auto p = position(i);
            c.insert(c.end(), p.begin(), p.end());
            m.push_back(marks_[i]);
        }
        return MarkedConfiguration(dim_, std::move(c), std::move(m));
    }

private:
    void check_distinct() const {
        const std::size_t n = size();
        if (n < 2) return;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto pa = position(a), pb = position(b);
            return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
        });
        for (std::size_t k = 1; k < n; ++k) {
            const auto pa = position(order[k - 1]), pb = position(order[k]);
            if (std::equal(pa.begin(), pa.end(), pb.begin()))
                throw Error("MarkedConfiguration: duplicate positions at indices " +
                            std::to_string(order[k - 1]) + " and " + std::to_string(order[k]));
        }
    }

    int dim_;
    std::vector<double> coords_;
    std::vector<double> marks_;
};

/// Marked Poisson sample: N ~ Poisson(lambda), then N i.i.d. positions with
/// the given density and independent uniform marks. The draw order per point
/// is position coordinates first, then the mark. Equal seeds give bit
/// identical output.
inline MarkedConfiguration sample_poisson(double lambda, const Density& density,
                                          std::uint64_t seed) {
    if (lambda < 0.0) throw Error("sample_poisson: negative intensity");
    Rng rng = Rng::stream(seed, /*w0=*/0x505353ULL);  // sampling stream tag
    const std::uint64_t n = rng.poisson(lambda);
    const int d = density.dim();
    std::vector<double> coords(n * static_cast<std::size_t>(d));
    std::vector<double> marks(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        density.sample_position(rng, coords.data() + i * static_cast<std::size_t>(d));
        marks[i] = rng.uniform01();
    }
    return MarkedConfiguration(d, std::move(coords), std::move(marks));
}

/// Maps every point y to center + factor * (y - center); marks unchanged.
inline MarkedConfiguration rescale_about(std::span<const double> center, double factor,
                                         const MarkedConfiguration& config) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw Error("rescale_about: factor must be finite and positive");
    const int d = config.dim();
    if (center.size() != static_cast<std::size_t>(d))
        throw Error("rescale_about: center dimension mismatch");
    std::vector<double> coords(config.coords());
    for (std::size_t i = 0; i < config.size(); ++i)
        for (int a = 0; a < d; ++a) {
            double& x = coords[i * static_cast<std::size_t>(d) + a];
            x = center[a] + factor * (x - center[a]);
        }
    return MarkedConfiguration(d, std::move(coords), std::vector<double>(config.marks()));
}

/// Grid of half-open cubes prod_a [j_a * s, (j_a + 1) * s) covering the
/// density support, keeping only cubes with positive mass. Cube side is
/// s = lambda^{-1/d} * rho.
struct CubePartition {
    struct Cube {
        std::vector<int> index;  // integer grid index per axis
        double nu;               // lambda * integral of kappa over the cube
    };

    double lambda = 0.0;
    double rho = 0.0;
    double side = 0.0;
    int dim = 0;
    std::vector<Cube> cubes;
    std::map<std::vector<int>, int> ordinal;  // grid index -> position in cubes

    int count() const { return static_cast<int>(cubes.size()); }
};

inline CubePartition build_cube_partition(double lambda, double rho, const Density& density) {
    if (!(lambda >= 1.0)) throw Error("build_cube_partition: lambda must be >= 1");
    if (!(rho > 0.0)) throw Error("build_cube_partition: rho must be positive");
    const int d = density.dim();
    CubePartition part;
    part.lambda = lambda;
    part.rho = rho;
    part.dim = d;
    part.side = std::pow(lambda, -1.0 / d) * rho;
    const double s = part.side;

    std::vector<int> j_lo(d), j_hi(d);
    for (int a = 0; a < d; ++a) {
        j_lo[a] = static_cast<int>(std::floor(density.domain().lo()[a] / s));
        j_hi[a] = static_cast<int>(std::floor(density.domain().hi()[a] / s));
    }
    std::vector<int> idx(j_lo);
    std::vector<double> lo(d), hi(d);
    for (;;) {
        for (int a = 0; a < d; ++a) {
            lo[a] = idx[a] * s;
            hi[a] = (idx[a] + 1) * s;
        }
        const double nu = lambda * density.integral_box(lo, hi);
        if (nu > 0.0) {
            part.ordinal.emplace(idx, static_cast<int>(part.cubes.size()));
            part.cubes.push_back({idx, nu});
        }
        int a = d - 1;
        while (a >= 0 && ++idx[a] > j_hi[a]) --a;
        if (a < 0) break;
        for (int b = a + 1; b < d; ++b) idx[b] = j_lo[b];
    }
    return part;
}

/// Assigns each point to the cube containing it under the half-open
/// convention. A point falling outside every positive-mass cube is a
/// contract violation and is reported with its coordinates.
inline std::vector<std::vector<int>> assign_points_to_cubes(const MarkedConfiguration& config,
                                                            const CubePartition& part) {
    if (config.dim() != part.dim) throw Error("assign_points_to_cubes: dimension mismatch");
    std::vector<std::vector<int>> buckets(part.cubes.size());
    std::vector<int> idx(part.dim);
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto x = config.position(i);
        for (int a = 0; a < part.dim; ++a)
            idx[a] = static_cast<int>(std::floor(x[a] / part.side));
        const auto it = part.ordinal.find(idx);
        if (it == part.ordinal.end()) {
            std::string where;
            for (int a = 0; a < part.dim; ++a)
                where += (a ? "," : "(") + std::to_string(x[a]);
            throw Error("assign_points_to_cubes: point " + where +
                        ") lies outside all positive-mass cubes");
        }
        buckets[it->second].push_back(static_cast<int>(i));
    }
    return buckets;
}

// ---------------------------------------------------------------------------
// CSV interchange

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

/// Writes a configuration as CSV with columns x_1..x_d,mark.
inline void write_config_csv(std::ostream& os, const MarkedConfiguration& config) {
    for (int a = 0; a < config.dim(); ++a) os << "x_" << (a + 1) << ",";
    os << "mark\n";
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto p = config.position(i);
        for (int a = 0; a < config.dim(); ++a) os << detail::format_double(p[a]) << ",";
        os << detail::format_double(config.mark(i)) << "\n";
    }
}

inline MarkedConfiguration read_config_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("config csv: missing header");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 2 || header.back() != "mark")
        throw Error("config csv: header must be x_1..x_d,mark");
    const int d = static_cast<int>(header.size()) - 1;
    std::vector<double> coords, marks;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw Error("config csv: line " + std::to_string(lineno) + ": field count mismatch");
        for (std::size_t f = 0; f < fields.size(); ++f) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[f], &pos);
            } catch (const std::exception&) {
                throw Error("config csv: line " + std::to_string(lineno) + ": bad number");
            }
            if (pos != fields[f].size())
                throw Error("config csv: line " + std::to_string(lineno) + ": bad number");
            if (f + 1 < fields.size())
                coords.push_back(v);
            else
                marks.push_back(v);
        }
    }
    return MarkedConfiguration(d, std::move(coords), std::move(marks));
}

/// Reads a grid density from CSV. Header lines:
///   d,<dim>
///   cells,<n_1>,...,<n_d>
///   box,<lo_1>,<hi_1>,...,<lo_d>,<hi_d>
/// followed by the cell weights in row-major order (any row grouping).
inline Density read_density_csv(std::istream& is) {
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(is, line)) throw Error(std::string("density csv: missing ") + what);
        return detail::split_csv_line(line);
    };
    auto fields = next_line("dimension header");
    if (fields.size() != 2 || fields[0] != "d") throw Error("density csv: expected d,<dim>");
    const int d = std::stoi(fields[1]);
    fields = next_line("cells header");
    if (fields.size() != static_cast<std::size_t>(d) + 1 || fields[0] != "cells")
        throw Error("density csv: expected cells,<n_1>,...,<n_d>");
    std::vector<int> cells(d);
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) {
        cells[a] = std::stoi(fields[a + 1]);
        total *= static_cast<std::size_t>(std::max(cells[a], 1));
    }
    fields = next_line("box header");
    if (fields.size() != 2 * static_cast<std::size_t>(d) + 1 || fields[0] != "box")
        throw Error("density csv: expected box,<lo_1>,<hi_1>,...");
    std::vector<double> lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
        lo[a] = std::stod(fields[2 * a + 1]);
        hi[a] = std::stod(fields[2 * a + 2]);
    }
    std::vector<double> weights;
    weights.reserve(total);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        for (const auto& f : detail::split_csv_line(line))
            if (!f.empty()) weights.push_back(std::stod(f));
    }
    if (weights.size() != total)
        throw Error("density csv: expected " + std::to_string(total) + " weights, got " +
                    std::to_string(weights.size()));
    return Density::grid(Domain(d, std::move(lo), std::move(hi)), std::move(cells),
                         std::move(weights));
}

}  // namespace stablab
