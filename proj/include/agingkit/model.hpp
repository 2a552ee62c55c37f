#pragma once

#include <span>
#include <utility>
#include <vector>

// Closed-form aging laws built from one negative and one positive feedback
// loop. Time is unit-agnostic; the fitting pipeline uses hours.
namespace agingkit {

/// Whether parameter records are held to the nonnegative domain seen in
/// practice, or left open for research use with negative values.
enum class ParameterDomain { Strict, Unrestricted };

/// f(t) = K * exp(alpha * t) * t^beta.
///
/// alpha is the positive-loop growth rate, beta the exponent contributed by
/// the negative loop's 1/t term, K the scale.
struct FeedbackLoopModel {
    double K = 1.0;
    double alpha = 0.0;
    double beta = 0.0;

    /// Throws DomainError unless K > 0, alpha >= 0, beta >= 0 (Strict), or
    /// all finite (Unrestricted).
    void validate(ParameterDomain domain = ParameterDomain::Strict) const;
};

/// y(t) = K * (1 - exp(-b(t) * t)) with b(t) = 1/t + v.
struct NegativeLoop {
    double K = 1.0;
    double v = 0.0;
};

/// z(t) = z0 * exp(a * t).
struct PositiveLoop {
    double z0 = 1.0;
    double a = 0.0;
};

double eval_model(const FeedbackLoopModel& m, double t);

/// Evaluated as K * (1 - exp(-(1 + v*t))), the form after substituting b(t).
double eval_negative(const NegativeLoop& loop, double t);

double eval_positive(const PositiveLoop& loop, double t);

/// z0 * exp(a*t) * (1 - exp(-(1/t + v)*t)); exactly
/// eval_positive({z0, a}, t) * eval_negative({1, v}, t).
double eval_combined(double z0, double a, double v, double t);

/// Sum over loop pairs of eval_negative * eval_positive.
double eval_multi_loop(std::span<const std::pair<PositiveLoop, NegativeLoop>> loops, double t);

/// Largest deviation between the centred finite-difference derivative of
/// ln f on `ts` and the law (ln f)' = alpha + beta/t, over interior points.
/// `ts` must be strictly increasing, positive, and hold at least 3 points.
double ode_residual(const FeedbackLoopModel& m, std::span<const double> ts);

}  // namespace agingkit
