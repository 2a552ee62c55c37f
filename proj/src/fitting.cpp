#include "agingkit/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "agingkit/csv.hpp"
#include "agingkit/error.hpp"

namespace agingkit {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kMinScale = std::numeric_limits<double>::min();

FeedbackLoopModel to_model(const Vec3& p) { return {p[0], p[1], p[2]}; }

Vec3 project(Vec3 p) {
    p[0] = std::max(p[0], kMinScale);
    p[1] = std::max(p[1], 0.0);
    p[2] = std::max(p[2], 0.0);
    return p;
}

double sum_of_squares(std::span<const double> t, std::span<const double> y, const Vec3& p) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - p[0] * std::exp(p[1] * t[i]) * std::pow(t[i], p[2]);
        ssr += r * r;
    }
    return ssr;
}

// Normal-equation pieces J^T J and J^T r at p, with r = y - f.
void linearize(std::span<const double> t, std::span<const double> y, const Vec3& p, Mat3& jtj,
               Vec3& jtr) {
    jtj.setZero();
    jtr.setZero();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double growth = std::exp(p[1] * t[i]) * std::pow(t[i], p[2]);
        const double f = p[0] * growth;
        const Vec3 j(growth, t[i] * f, std::log(t[i]) * f);
        jtj.noalias() += j * j.transpose();
        jtr.noalias() += j * (y[i] - f);
    }
}

// Largest cosine between a Jacobian column and the residual vector. Components
// that would push a parameter through its bound do not count.
double projected_gradient_cosine(const Vec3& p, const Mat3& jtj, const Vec3& jtr, double ssr) {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        const bool at_bound = (k == 0) ? p[0] <= kMinScale : p[k] <= 0.0;
        if (at_bound && jtr[k] < 0.0) {
            continue;
        }
        const double scale = std::sqrt(jtj(k, k) * ssr);
        if (scale > 0.0) {
            worst = std::max(worst, std::abs(jtr[k]) / scale);
        }
    }
    return worst;
}

// Every component moved by at most `tolerance` of its own magnitude.
bool step_negligible(const Vec3& from, const Vec3& to, double tolerance) {
    for (int k = 0; k < 3; ++k) {
        if (std::abs(to[k] - from[k]) > tolerance * (std::abs(from[k]) + tolerance)) {
            return false;
        }
    }
    return true;
}

Vec3 log_space_start(std::span<const double> t, std::span<const double> y, double y_floor) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] > y_floor) {
            usable.push_back(i);
        }
    }
    if (usable.size() < 3) {
        throw DomainError("too few samples above y_floor for the log-space start");
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(usable.size()), 3);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(usable.size()));
    for (Eigen::Index r = 0; r < design.rows(); ++r) {
        const auto i = usable[static_cast<std::size_t>(r)];
        design(r, 0) = 1.0;
        design(r, 1) = t[i];
        design(r, 2) = std::log(t[i]);
        rhs[r] = std::log(y[i]);
    }
    const Vec3 coef = design.colPivHouseholderQr().solve(rhs);
    Vec3 p(std::exp(coef[0]), coef[1], coef[2]);
    if (!p.allFinite()) {
        p = Vec3(1.0, 0.0, 0.0);
    }
    return project(p);
}

// Solves the damped system for the free parameters; parameters sitting on a
// bound whose step would leave the feasible set are held fixed.
Vec3 damped_step(const Mat3& jtj, const Vec3& jtr, const Vec3& p, double damping) {
    std::array<bool, 3> free{true, true, true};
    Vec3 step = Vec3::Zero();
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<int> idx;
        for (int k = 0; k < 3; ++k) {
            if (free[static_cast<std::size_t>(k)]) {
                idx.push_back(k);
            }
        }
        step.setZero();
        if (idx.empty()) {
            return step;
        }
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd a(m, m);
        Eigen::VectorXd b(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                a(r, c) = jtj(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
            }
            const double diag = jtj(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(r)]);
            a(r, r) += damping * std::max(diag, 1e-300);
            b[r] = jtr[idx[static_cast<std::size_t>(r)]];
        }
        const Eigen::VectorXd x = a.ldlt().solve(b);
        for (Eigen::Index r = 0; r < m; ++r) {
            step[idx[static_cast<std::size_t>(r)]] = x[r];
        }
        bool changed = false;
        for (int k = 1; k < 3; ++k) {
            if (free[static_cast<std::size_t>(k)] && p[k] <= 0.0 && step[k] < 0.0) {
                free[static_cast<std::size_t>(k)] = false;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }
    return step;
}

void validate_inputs(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) {
        throw DomainError("fit: t and y differ in length");
    }
    if (t.size() < 4) {
        throw DomainError("fit needs at least 4 samples");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !std::isfinite(t[i]) || !std::isfinite(y[i])) {
            throw DomainError("fit needs finite samples with t > 0");
        }
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (!(*hi > *lo)) {
        throw DomainError("degenerate curve: all aging degrees are equal");
    }
}

}  // namespace

FitReport fit(std::span<const double> t, std::span<const double> y, const FitOptions& options,
              std::string name) {
    validate_inputs(t, y);

    Vec3 p = log_space_start(t, y, options.y_floor);
    double ssr = sum_of_squares(t, y, p);

    FitReport report;
    report.name = std::move(name);
    report.n_samples = t.size();
    report.objective_history.push_back(ssr);

    double damping = options.initial_damping;
    Mat3 jtj;
    Vec3 jtr;
    linearize(t, y, p, jtj, jtr);

    while (report.iterations < options.max_iterations) {
        if (ssr == 0.0 || projected_gradient_cosine(p, jtj, jtr, ssr) <= options.tolerance) {
            report.converged = true;
            break;
        }
        ++report.iterations;
        const Vec3 candidate = project(p + damped_step(jtj, jtr, p, damping));
        const double candidate_ssr = sum_of_squares(t, y, candidate);
        if (std::isfinite(candidate_ssr) && candidate_ssr < ssr) {
            const bool negligible = step_negligible(p, candidate, options.tolerance);
            p = candidate;
            ssr = candidate_ssr;
            report.objective_history.push_back(ssr);
            damping = std::max(damping / 10.0, 1e-12);
            linearize(t, y, p, jtj, jtr);
            if (negligible) {
                report.converged = true;
                break;
            }
        } else {
            damping *= 10.0;
            // No damping yields a decrease: p is stationary to machine precision.
            if (damping > 1e16) {
                report.converged = true;
                break;
            }
        }
    }

    report.model = to_model(p);
    std::vector<double> predicted(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        predicted[i] = eval_model(report.model, t[i]);
    }
    report.rmse = rmse(y, predicted);
    report.r_square = r_square(y, predicted);
    return report;
}

FitReport fit(const AgingCurve& curve, const FitOptions& options) {
    const auto t = curve.times();
    const auto y = curve.degrees();
    return fit(t, y, options, curve.source_name());
}

double rmse(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size()) {
        throw DomainError("rmse: length mismatch");
    }
    if (observed.empty()) {
        throw DomainError("rmse: empty input");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = predicted[i] - observed[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(observed.size()));
}

double r_square(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size()) {
        throw DomainError("r_square: length mismatch");
    }
    if (observed.size() < 2) {
        throw DomainError("r_square needs at least 2 samples");
    }
    const double mean =
        std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        ss_tot += (observed[i] - mean) * (observed[i] - mean);
    }
    if (ss_tot == 0.0) {
        throw DomainError("r_square: observed values are all equal");
    }
    return 1.0 - ss_res / ss_tot;
}

std::string format_fit_row(const FitReport& report) {
    std::string name = report.name;
    std::replace(name.begin(), name.end(), ',', '_');
    std::replace(name.begin(), name.end(), '\n', '_');
    return name + ',' + csv::format_number(report.model.K) + ',' +
           csv::format_number(report.model.alpha) + ',' + csv::format_number(report.model.beta) +
           ',' + csv::format_number(report.rmse) + ',' + csv::format_number(report.r_square);
}

void write_fit_report(std::ostream& out, std::span<const FitReport> reports) {
    out << kFitReportHeader << '\n';
    for (const auto& r : reports) {
        out << format_fit_row(r) << '\n';
    }
}

}  // namespace agingkit
