#include <doctest.h>

#include <cmath>
#include <random>

#include "agingkit/error.hpp"
#include "agingkit/smoothing.hpp"
#include "oracles.hpp"

using namespace agingkit;

namespace {

struct Noisy {
    std::vector<double> x;
    std::vector<double> y;
};

Noisy noisy_sine(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 0.2);
    Noisy d;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 10.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        d.x.push_back(x);
        d.y.push_back(std::sin(x) + noise(gen));
    }
    return d;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace

TEST_CASE("window size") {
    CHECK(lowess_window(100, 0.3) == 30);
    CHECK(lowess_window(10, 0.25) == 3);
    CHECK(lowess_window(7, 1.0) == 7);
    CHECK_THROWS_AS((lowess_window(10, 0.0)), DomainError);
    CHECK_THROWS_AS((lowess_window(10, 1.5)), DomainError);
    CHECK_THROWS_AS((lowess_window(10, 0.1)), DomainError);
}

TEST_CASE("constant series stays constant") {
    const std::vector<double> x{0, 1, 2, 5, 9, 10};
    const std::vector<double> y(6, 3.25);
    for (double f : {0.4, 0.7, 1.0}) {
        for (int it : {0, 2}) {
            for (double v : lowess(x, y, {f, it})) {
                CHECK(v == 3.25);
            }
        }
    }
}

TEST_CASE("a line is reproduced with fraction 1") {
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 25; ++i) {
        x.push_back(0.37 * i + 0.01 * i * i);
        y.push_back(2.0 * x.back() + 1.0);
    }
    const auto out = lowess(x, y, {1.0, 0});
    CHECK(max_abs_diff(out, y) <= 1e-9);
}

TEST_CASE("matches the naive reference on a noisy sine") {
    const auto d = noisy_sine(100, 3);
    const auto out = lowess(d.x, d.y, {0.3, 0});
    CHECK(max_abs_diff(out, oracle::naive_lowess(d.x, d.y, 0.3)) <= 1e-9);
}

TEST_CASE("matches the naive reference on irregular grids with boundary ties") {
    // Integer grid with gaps: many equal distances.
    const std::vector<double> x{0, 1, 2, 4, 6, 7, 8, 10, 12, 13, 14, 16};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(std::cos(v) + 0.1 * v);
    }
    for (double f : {0.2, 0.3, 0.5, 0.8}) {
        CHECK(max_abs_diff(lowess(x, y, {f, 0}), oracle::naive_lowess(x, y, f)) <= 1e-9);
    }
}

TEST_CASE("robustness passes downweight an outlier") {
    auto d = noisy_sine(60, 5);
    d.y[30] += 25.0;
    const auto plain = lowess(d.x, d.y, {0.3, 0});
    const auto robust = lowess(d.x, d.y, {0.3, 3});
    CHECK(std::abs(robust[30] - std::sin(d.x[30])) < std::abs(plain[30] - std::sin(d.x[30])));
    CHECK(std::abs(robust[30] - std::sin(d.x[30])) < 0.5);
}

TEST_CASE("bad inputs") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 2, 3, 4};
    CHECK_THROWS_AS((lowess(std::vector<double>{0, 1}, std::vector<double>{1, 2}, {1.0, 0})), DomainError);
    CHECK_THROWS_AS((lowess(x, std::vector<double>{1, 2, 3}, {})), DomainError);
    CHECK_THROWS_AS((lowess(std::vector<double>{0, 1, 1, 2}, y, {1.0, 0})), DomainError);
    CHECK_THROWS_AS((lowess(x, y, {0.0, 0})), DomainError);
    CHECK_THROWS_AS((lowess(x, y, {0.25, 0})), DomainError);
    CHECK_NOTHROW((lowess(x, y, {0.3, 0})));
    CHECK_THROWS_AS((lowess(x, y, {0.5, -1})), DomainError);
}

TEST_CASE("series overload keeps metadata and grid") {
    const MetricSeries s("bw", "kbyte", Orientation::LowerIsWorse, {{0, 5}, {1, 7}, {2, 6}, {3, 9}, {4, 8}});
    const auto out = lowess(s, {0.6, 0});
    CHECK(out.name() == "bw");
    CHECK(out.unit() == "kbyte");
    CHECK(out.orientation() == Orientation::LowerIsWorse);
    CHECK(out.times() == s.times());
}

TEST_CASE("property: idempotent on constant and linear inputs") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> coef(-5, 5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = noisy_sine(40, static_cast<std::uint64_t>(trial));
        const double a = coef(gen);
        const double b = coef(gen);
        std::vector<double> line;
        for (double v : d.x) {
            line.push_back(a * v + b);
        }
        const auto once = lowess(d.x, line, {0.3, 0});
        const auto twice = lowess(d.x, once, {0.3, 0});
        CHECK(max_abs_diff(once, line) <= 1e-9);
        CHECK(max_abs_diff(twice, once) <= 1e-9);
    }
}

TEST_CASE("property: translation and scale equivariance") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = noisy_sine(80, seed);
        const auto base = lowess(d.x, d.y, {0.3, 1});

        std::vector<double> shifted = d.y;
        for (auto& v : shifted) {
            v += 1000.0;
        }
        const auto out_shifted = lowess(d.x, shifted, {0.3, 1});
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(std::abs(out_shifted[i] - 1000.0 - base[i]) <= 1e-9);
        }

        // Power-of-two scale factors commute exactly with every operation.
        for (double s : {4.0, -0.5}) {
            std::vector<double> scaled = d.y;
            for (auto& v : scaled) {
                v *= s;
            }
            const auto out_scaled = lowess(d.x, scaled, {0.3, 1});
            for (std::size_t i = 0; i < base.size(); ++i) {
                CHECK(out_scaled[i] == base[i] * s);
            }
        }
    }
}

TEST_CASE("property: locality") {
    const auto d = noisy_sine(100, 9);
    const auto base = lowess(d.x, d.y, {0.3, 0});
    // With k = 30 on a uniform grid, point 10 only sees indices 0..29 at most.
    auto perturbed = d.y;
    perturbed[80] += 50.0;
    perturbed[99] -= 20.0;
    const auto out = lowess(d.x, perturbed, {0.3, 0});
    for (std::size_t i = 0; i <= 40; ++i) {
        CHECK(out[i] == base[i]);
    }
    CHECK(out[80] != base[80]);
}

TEST_CASE("property: evaluation is order independent") {
    // Reversing the axis mirrors the problem; each output depends only on its window.
    const auto d = noisy_sine(50, 13);
    std::vector<double> rx;
    std::vector<double> ry;
    for (std::size_t i = d.x.size(); i-- > 0;) {
        rx.push_back(10.0 - d.x[i]);
        ry.push_back(d.y[i]);
    }
    const auto fwd = lowess(d.x, d.y, {0.35, 0});
    const auto rev = lowess(rx, ry, {0.35, 0});
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        CHECK(fwd[i] == doctest::Approx(rev[fwd.size() - 1 - i]).epsilon(1e-9));
    }
}
