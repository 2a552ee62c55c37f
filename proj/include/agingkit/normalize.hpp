#pragma once

#include <span>
#include <string>
#include <vector>

#include "agingkit/smoothing.hpp"
#include "agingkit/timeseries.hpp"

namespace agingkit {

struct CurvePoint {
    double t = 0.0;  // > 0
    double y = 0.0;  // aging degree in [0, 1]
};

/// Normalized aging degree Y(t) of one metric.
///
/// Every y lies in [0, 1] and t is strictly increasing and positive. The
/// values 0 and 1 are attained on the normalized series; when the series
/// started at t = 0 that sample is dropped afterwards (the fitted law is
/// undefined there), so one endpoint may be missing from the stored points.
class AgingCurve {
public:
    AgingCurve(std::string source_name, std::vector<CurvePoint> points);

    const std::string& source_name() const noexcept { return source_name_; }
    std::span<const CurvePoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::vector<double> times() const;
    std::vector<double> degrees() const;

    /// Builds a curve without the range and sign checks. Test and research
    /// use only; the fitter still validates what it needs.
    static AgingCurve unchecked(std::string source_name, std::vector<CurvePoint> points);

private:
    struct Unchecked {};
    AgingCurve(Unchecked, std::string source_name, std::vector<CurvePoint> points);

    std::string source_name_;
    std::vector<CurvePoint> points_;
};

/// Affine map onto [0, 1]: (v - min)/(max - min) for HigherIsWorse and
/// (max - v)/(max - min) for LowerIsWorse.
std::vector<double> normalize_only(std::span<const double> values, Orientation orientation);

/// Smooths with LOWESS, normalizes by the series' orientation, then drops a
/// sample at t = 0.
AgingCurve to_aging_curve(const MetricSeries& series, const SmoothingConfig& config);

}  // namespace agingkit
