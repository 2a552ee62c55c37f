#include "agingkit/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "agingkit/error.hpp"

namespace agingkit {

namespace {

struct Window {
    std::size_t lo = 0;  // inclusive
    std::size_t hi = 0;  // inclusive
    double d_max = 0.0;
};

// The k nearest points of a sorted grid are contiguous around i. Grow
// outward one point at a time, then absorb ties at the boundary distance.
Window nearest_window(std::span<const double> x, std::size_t i, std::size_t k) {
    const std::size_t n = x.size();
    std::size_t lo = i;
    std::size_t hi = i;
    for (std::size_t count = 1; count < k; ++count) {
        if (lo == 0) {
            ++hi;
        } else if (hi + 1 == n) {
            --lo;
        } else if (x[i] - x[lo - 1] <= x[hi + 1] - x[i]) {
            --lo;
        } else {
            ++hi;
        }
    }
    const double d_max = std::max(x[i] - x[lo], x[hi] - x[i]);
    while (lo > 0 && x[i] - x[lo - 1] == d_max) {
        --lo;
    }
    while (hi + 1 < n && x[hi + 1] - x[i] == d_max) {
        ++hi;
    }
    return {lo, hi, d_max};
}

double tricube(double u) {
    if (u >= 1.0) {
        return 0.0;
    }
    const double c = 1.0 - u * u * u;
    return c * c * c;
}

double bisquare(double u) {
    if (std::abs(u) >= 1.0) {
        return 0.0;
    }
    const double c = 1.0 - u * u;
    return c * c;
}

double window_mean(std::span<const double> y, const Window& w) {
    double sum = 0.0;
    for (std::size_t j = w.lo; j <= w.hi; ++j) {
        sum += y[j];
    }
    return sum / static_cast<double>(w.hi - w.lo + 1);
}

double fit_point(std::span<const double> x, std::span<const double> y,
                 std::span<const double> robustness, std::size_t i, std::size_t k,
                 double spread_floor) {
    const Window w = nearest_window(x, i, k);
    // Flat neighbourhoods are returned as is, free of rounding.
    if (std::all_of(y.begin() + static_cast<std::ptrdiff_t>(w.lo), y.begin() + static_cast<std::ptrdiff_t>(w.hi) + 1,
                    [&](double v) { return v == y[w.lo]; })) {
        return y[w.lo];
    }
    if (w.d_max == 0.0) {
        return window_mean(y, w);
    }

    double sum_w = 0.0;
    double sum_wx = 0.0;
    double sum_wy = 0.0;
    for (std::size_t j = w.lo; j <= w.hi; ++j) {
        const double wt = tricube(std::abs(x[j] - x[i]) / w.d_max) * robustness[j];
        sum_w += wt;
        sum_wx += wt * x[j];
        sum_wy += wt * y[j];
    }
    if (sum_w <= 0.0) {
        return window_mean(y, w);
    }
    const double x_bar = sum_wx / sum_w;
    const double y_bar = sum_wy / sum_w;

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t j = w.lo; j <= w.hi; ++j) {
        const double wt = tricube(std::abs(x[j] - x[i]) / w.d_max) * robustness[j];
        const double dx = x[j] - x_bar;
        sxx += wt * dx * dx;
        sxy += wt * dx * (y[j] - y_bar);
    }
    if (sxx <= spread_floor * sum_w) {
        return y_bar;
    }
    return y_bar + sxy / sxx * (x[i] - x_bar);
}

double median(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

std::size_t lowess_window(std::size_t n, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw DomainError("fraction out of range (0, 1]");
    }
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (k < 2) {
        throw DomainError("smoothing window too small: ceil(fraction*n) must be at least 2");
    }
    return std::min(k, n);
}

std::vector<double> lowess(std::span<const double> x, std::span<const double> y,
                           const SmoothingConfig& config) {
    if (x.size() != y.size()) {
        throw DomainError("lowess: x and y differ in length");
    }
    if (x.size() < 3) {
        throw DomainError("lowess needs at least 3 samples");
    }
    if (config.robust_iterations < 0) {
        throw DomainError("robust_iterations must be nonnegative");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw DomainError("lowess: x must be strictly increasing");
        }
    }
    const std::size_t n = x.size();
    const std::size_t k = lowess_window(n, config.fraction);

    // Below this weighted spread the local slope is numerically meaningless.
    const double range = x.back() - x.front();
    const double spread_floor = 1e-6 * range * range;

    std::vector<double> robustness(n, 1.0);
    std::vector<double> fitted(n);
    for (int pass = 0; pass <= config.robust_iterations; ++pass) {
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] = fit_point(x, y, robustness, i, k, spread_floor);
        }
        if (pass == config.robust_iterations) {
            break;
        }
        std::vector<double> abs_residuals(n);
        for (std::size_t i = 0; i < n; ++i) {
            abs_residuals[i] = std::abs(y[i] - fitted[i]);
        }
        const double scale = 6.0 * median(abs_residuals);
        if (scale == 0.0) {
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            robustness[i] = bisquare((y[i] - fitted[i]) / scale);
        }
    }
    return fitted;
}

MetricSeries lowess(const MetricSeries& series, const SmoothingConfig& config) {
    const auto t = series.times();
    const auto v = series.values();
    return series.with_values(lowess(t, v, config));
}

}  // namespace agingkit
