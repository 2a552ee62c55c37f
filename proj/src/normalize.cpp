#include "agingkit/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agingkit/error.hpp"

namespace agingkit {

AgingCurve::AgingCurve(std::string source_name, std::vector<CurvePoint> points)
    : source_name_(std::move(source_name)), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!(p.t > 0.0) || !std::isfinite(p.t)) {
            throw DomainError("aging curve time must be positive (point " + std::to_string(i) + ")");
        }
        if (!(p.y >= 0.0 && p.y <= 1.0)) {
            throw DomainError("aging degree outside [0, 1] (point " + std::to_string(i) + ")");
        }
        if (i > 0 && !(p.t > points_[i - 1].t)) {
            throw DomainError("aging curve times must be strictly increasing");
        }
    }
}

AgingCurve::AgingCurve(Unchecked, std::string source_name, std::vector<CurvePoint> points)
    : source_name_(std::move(source_name)), points_(std::move(points)) {}

AgingCurve AgingCurve::unchecked(std::string source_name, std::vector<CurvePoint> points) {
    return AgingCurve(Unchecked{}, std::move(source_name), std::move(points));
}

std::vector<double> AgingCurve::times() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) {
        out.push_back(p.t);
    }
    return out;
}

std::vector<double> AgingCurve::degrees() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) {
        out.push_back(p.y);
    }
    return out;
}

std::vector<double> normalize_only(std::span<const double> values, Orientation orientation) {
    if (values.empty()) {
        throw DomainError("degenerate series: no aging trend representable (empty)");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double range = hi - lo;
    // A spread at rounding level carries no trend either.
    const double noise_floor = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    if (!(range > noise_floor)) {
        throw DomainError("degenerate series: no aging trend representable");
    }
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = orientation == Orientation::HigherIsWorse ? (values[i] - lo) / range
                                                                   : (hi - values[i]) / range;
        // Rounding can leave y a hair outside [0, 1] for values next to an extremum.
        out[i] = std::clamp(y, 0.0, 1.0);
    }
    return out;
}

AgingCurve to_aging_curve(const MetricSeries& series, const SmoothingConfig& config) {
    if (series.size() < 3) {
        throw DomainError("aging curve needs at least 3 samples");
    }
    const auto smoothed = lowess(series.times(), series.values(), config);
    const auto y = normalize_only(smoothed, series.orientation());

    std::vector<CurvePoint> points;
    points.reserve(y.size());
    const auto samples = series.samples();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (samples[i].t == 0.0) {
            continue;
        }
        points.push_back({samples[i].t, y[i]});
    }
    return AgingCurve(series.name(), std::move(points));
}

}  // namespace agingkit
