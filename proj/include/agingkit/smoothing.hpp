#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "agingkit/timeseries.hpp"

namespace agingkit {

struct SmoothingConfig {
    /// Share of all samples that joins each local regression, in (0, 1].
    double fraction = 0.3;
    /// Bisquare reweighting passes after the initial fit.
    int robust_iterations = 0;
};

/// Neighbourhood size ceil(fraction * n) before tie expansion.
/// Throws DomainError if the fraction is out of (0, 1] or the window
/// would hold fewer than two points.
std::size_t lowess_window(std::size_t n, double fraction);

/// Locally weighted linear regression (LOWESS) on an arbitrary grid.
///
/// For every x[i] the neighbourhood is the ceil(fraction*n) points nearest
/// in |x - x[i]|, widened to include every point tied at the boundary
/// distance. Weights are tricube in d/d_max times the robustness weights.
/// A zero-width neighbourhood falls back to its unweighted mean; a
/// neighbourhood whose weighted spread in x vanishes falls back to the
/// weighted mean.
///
/// `x` must be strictly increasing. Every output depends only on its own
/// neighbourhood, so results do not depend on evaluation order.
std::vector<double> lowess(std::span<const double> x, std::span<const double> y,
                           const SmoothingConfig& config);

/// LOWESS over the time axis of a series; metadata is preserved.
MetricSeries lowess(const MetricSeries& series, const SmoothingConfig& config);

}  // namespace agingkit
