#include "agingkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agingkit/error.hpp"

namespace agingkit {

namespace {

void require_positive_time(double t) {
    if (!(t > 0.0)) {
        throw DomainError("time must be positive, got " + std::to_string(t));
    }
}

}  // namespace

void FeedbackLoopModel::validate(ParameterDomain domain) const {
    if (!std::isfinite(K) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw DomainError("model parameters must be finite");
    }
    if (domain == ParameterDomain::Unrestricted) {
        return;
    }
    if (!(K > 0.0)) {
        throw DomainError("model scale K must be positive");
    }
    if (alpha < 0.0 || beta < 0.0) {
        throw DomainError("model rates alpha and beta must be nonnegative");
    }
}

double eval_model(const FeedbackLoopModel& m, double t) {
    require_positive_time(t);
    return m.K * std::exp(m.alpha * t) * std::pow(t, m.beta);
}

double eval_negative(const NegativeLoop& loop, double t) {
    require_positive_time(t);
    return loop.K * -std::expm1(-(1.0 + loop.v * t));
}

double eval_positive(const PositiveLoop& loop, double t) {
    if (t < 0.0) {
        throw DomainError("time must be nonnegative");
    }
    return loop.z0 * std::exp(loop.a * t);
}

double eval_combined(double z0, double a, double v, double t) {
    return eval_positive({z0, a}, t) * eval_negative({1.0, v}, t);
}

double eval_multi_loop(std::span<const std::pair<PositiveLoop, NegativeLoop>> loops, double t) {
    if (loops.empty()) {
        throw DomainError("multi-loop model needs at least one loop pair");
    }
    require_positive_time(t);
    double sum = 0.0;
    for (const auto& [positive, negative] : loops) {
        sum += eval_positive(positive, t) * eval_negative(negative, t);
    }
    return sum;
}

double ode_residual(const FeedbackLoopModel& m, std::span<const double> ts) {
    if (ts.size() < 3) {
        throw DomainError("ode_residual needs at least 3 time points");
    }
    if (!(m.K > 0.0)) {
        throw DomainError("ode_residual needs K > 0 (ln f is undefined otherwise)");
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        require_positive_time(ts[i]);
        if (i > 0 && !(ts[i] > ts[i - 1])) {
            throw DomainError("ode_residual time points must be strictly increasing");
        }
    }
    std::vector<double> log_f(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        log_f[i] = std::log(eval_model(m, ts[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double h_left = ts[i] - ts[i - 1];
        const double h_right = ts[i + 1] - ts[i];
        // Three-point derivative, second order on non-uniform grids too.
        const double derivative =
            (log_f[i + 1] - log_f[i]) * h_left / (h_right * (h_left + h_right)) +
            (log_f[i] - log_f[i - 1]) * h_right / (h_left * (h_left + h_right));
        const double law = m.alpha + m.beta / ts[i];
        worst = std::max(worst, std::abs(derivative - law));
    }
    return worst;
}

}  // namespace agingkit
