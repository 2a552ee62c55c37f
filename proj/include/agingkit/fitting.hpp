#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "agingkit/model.hpp"
#include "agingkit/normalize.hpp"

namespace agingkit {

struct FitOptions {
    int max_iterations = 200;
    /// Samples at or below this degree are left out of the log-space start.
    double y_floor = 1e-6;
    /// Per-parameter relative step and residual/Jacobian cosine thresholds.
    double tolerance = 1e-10;
    double initial_damping = 1e-3;
};

struct FitReport {
    std::string name;
    FeedbackLoopModel model;
    double rmse = 0.0;
    double r_square = 0.0;
    std::size_t n_samples = 0;
    bool converged = false;
    int iterations = 0;
    /// Sum of squared residuals at the start point and after every accepted step.
    std::vector<double> objective_history;
};

/// Least-squares fit of K * exp(alpha*t) * t^beta, which is the maximum
/// likelihood estimate under i.i.d. Gaussian noise.
///
/// Starts from ordinary least squares on ln y = ln K + alpha*t + beta*ln t
/// over samples above `y_floor`, then refines with Levenberg-Marquardt in
/// the original space, projecting onto K > 0, alpha >= 0, beta >= 0.
/// Non-convergence is reported through `converged`; the best parameters
/// found are still returned.
FitReport fit(const AgingCurve& curve, const FitOptions& options = {});

/// Same as above on raw arrays; `t` must be positive.
FitReport fit(std::span<const double> t, std::span<const double> y,
              const FitOptions& options = {}, std::string name = {});

/// sqrt(sum (predicted - observed)^2 / n).
double rmse(std::span<const double> observed, std::span<const double> predicted);

/// 1 - SS_res / SS_tot with SS_res = sum (observed - predicted)^2 and
/// SS_tot = sum (observed - mean(observed))^2. Negative for models worse
/// than the mean.
double r_square(std::span<const double> observed, std::span<const double> predicted);

inline constexpr const char* kFitReportHeader = "name,K,alpha,beta,rmse,r_square";

/// One `name,K,alpha,beta,rmse,r_square` row, no trailing newline.
std::string format_fit_row(const FitReport& report);

/// Header plus one row per report.
void write_fit_report(std::ostream& out, std::span<const FitReport> reports);

}  // namespace agingkit
