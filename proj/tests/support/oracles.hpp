#pragma once

// Independent reference computations used as test oracles. They share no
// code with the library and favour directness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline double tricube(double u) {
    if (u >= 1.0) {
        return 0.0;
    }
    const double c = 1.0 - u * u * u;
    return c * c * c;
}

// Straight LOWESS: for every point, sort all distances, take the k-th as
// the bandwidth, keep everything within it, and solve the 2x2 weighted
// normal equations by Cramer's rule.
inline std::vector<double> naive_lowess(const std::vector<double>& x, const std::vector<double>& y,
                                        double fraction) {
    const std::size_t n = x.size();
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> dist(n);
        for (std::size_t j = 0; j < n; ++j) {
            dist[j] = std::abs(x[j] - x[i]);
        }
        std::vector<double> sorted = dist;
        std::sort(sorted.begin(), sorted.end());
        const double h = sorted[k - 1];

        double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
        double plain_sum = 0;
        int members = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (dist[j] > h) {
                continue;
            }
            ++members;
            plain_sum += y[j];
            const double w = h > 0 ? tricube(dist[j] / h) : 1.0;
            s0 += w;
            s1 += w * x[j];
            s2 += w * x[j] * x[j];
            t0 += w * y[j];
            t1 += w * x[j] * y[j];
        }
        if (h == 0) {
            out[i] = plain_sum / members;
            continue;
        }
        const double det = s0 * s2 - s1 * s1;
        const double intercept = (t0 * s2 - s1 * t1) / det;
        const double slope = (s0 * t1 - s1 * t0) / det;
        out[i] = intercept + slope * x[i];
    }
    return out;
}

inline double eq11(double K, double alpha, double beta, double t) {
    return K * std::exp(alpha * t) * std::pow(t, beta);
}

// t_i = span * i / n for i = 1..n.
inline std::vector<double> open_grid(std::size_t n, double span) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = span * static_cast<double>(i + 1) / static_cast<double>(n);
    }
    return t;
}

inline std::vector<double> eq11_samples(double K, double alpha, double beta, const std::vector<double>& t) {
    std::vector<double> y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        y[i] = eq11(K, alpha, beta, t[i]);
    }
    return y;
}

inline std::vector<double> with_noise(std::vector<double> y, double sigma, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& v : y) {
        v += noise(gen);
    }
    return y;
}

inline double relative_error(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("agingkit_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
