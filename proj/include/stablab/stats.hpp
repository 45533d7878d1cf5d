#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "stablab/error.hpp"

namespace stablab {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error("mean: empty input");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance (n-1 denominator).
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("sample_variance: need at least 2 samples");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

/// Standard normal distribution function, evaluated through erfc so the
/// absolute error stays below 1e-10 over the whole line.
inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

/// Kolmogorov distance between the empirical CDF of the samples and the
/// standard normal, evaluated at both one-sided limits of every jump.
/// Samples are expected to be standardized by the caller.
inline double ks_distance(std::span<const double> samples) {
    if (samples.empty()) throw Error("ks_distance: empty input");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double phi = normal_cdf(xs[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - phi;   // right limit
        const double lo = phi - static_cast<double>(i) / n;           // left limit
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
inline FitResult fit_linear(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error("fit_linear: size mismatch");
    if (xs.size() < 2) throw Error("fit_linear: need at least 2 points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw Error("fit_linear: degenerate x values");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r2 = 1.0;  // all residuals zero
    } else {
        double ssres = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
            ssres += r * r;
        }
        fit.r2 = 1.0 - ssres / syy;
    }
    return fit;
}

/// Least squares on (log x, log y); ys must be strictly positive.
inline FitResult fit_scaling(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error("fit_scaling: size mismatch");
    if (xs.size() < 3) throw Error("fit_scaling: need at least 3 points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) throw Error("fit_scaling: nonpositive x");
        if (!(ys[i] > 0.0)) throw Error("fit_scaling: nonpositive y");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return fit_linear(lx, ly);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series expansion; valid for
// x < a + 1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction; valid for
// x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw Error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// p-value of a chi-square statistic with the given degrees of freedom.
inline double chi_square_pvalue(double stat, double df) {
    return gamma_q(df / 2.0, stat / 2.0);
}

inline double binomial_stderr(double phat, double n) {
    return std::sqrt(std::max(0.0, phat * (1.0 - phat)) / n);
}

}  // namespace stablab
