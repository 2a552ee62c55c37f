#include <doctest.h>

#include <algorithm>
#include <random>

#include "agingkit/error.hpp"
#include "agingkit/normalize.hpp"

using namespace agingkit;

namespace {

std::vector<double> random_values(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> v(-100.0, 100.0);
    std::vector<double> out(n);
    for (auto& x : out) {
        x = v(gen);
    }
    return out;
}

MetricSeries series_of(std::vector<double> t, std::vector<double> v, Orientation o) {
    std::vector<Sample> s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        s.push_back({t[i], v[i]});
    }
    return MetricSeries("m", "", o, s);
}

}  // namespace

TEST_CASE("normalize_only examples") {
    CHECK(normalize_only(std::vector<double>{0, 10}, Orientation::HigherIsWorse) == std::vector<double>{0, 1});
    CHECK(normalize_only(std::vector<double>{0, 10}, Orientation::LowerIsWorse) == std::vector<double>{1, 0});
    const auto y = normalize_only(std::vector<double>{1, 2, 4}, Orientation::HigherIsWorse);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(y[2] == 1.0);
}

TEST_CASE("normalize_only rejects degenerate input") {
    CHECK_THROWS_AS((normalize_only(std::vector<double>{5, 5, 5}, Orientation::HigherIsWorse)), DomainError);
    CHECK_THROWS_AS((normalize_only(std::vector<double>{}, Orientation::HigherIsWorse)), DomainError);
}

TEST_CASE("to_aging_curve examples") {
    const SmoothingConfig exact{1.0, 0};
    const auto up = to_aging_curve(series_of({1, 2, 3}, {2, 4, 6}, Orientation::HigherIsWorse), exact);
    const auto down = to_aging_curve(series_of({1, 2, 3}, {2, 4, 6}, Orientation::LowerIsWorse), exact);
    const std::vector<double> inc{0, 0.5, 1};
    const std::vector<double> dec{1, 0.5, 0};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(up.degrees()[i] == doctest::Approx(inc[i]).epsilon(1e-12));
        CHECK(down.degrees()[i] == doctest::Approx(dec[i]).epsilon(1e-12));
    }
    CHECK(up.source_name() == "m");
    CHECK_THROWS_AS((to_aging_curve(series_of({1, 2, 3}, {5, 5, 5}, Orientation::HigherIsWorse), exact)), DomainError);
}

TEST_CASE("to_aging_curve drops only a t = 0 sample, after normalizing") {
    const SmoothingConfig exact{1.0, 0};
    const auto c = to_aging_curve(series_of({0, 1, 2, 3}, {2, 4, 6, 8}, Orientation::HigherIsWorse), exact);
    REQUIRE(c.size() == 3);
    CHECK(c.times() == std::vector<double>{1, 2, 3});
    // The dropped sample held the 0; the remaining values keep their scale.
    CHECK(c.degrees()[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(c.degrees()[2] == doctest::Approx(1.0).epsilon(1e-12));

    const auto kept = to_aging_curve(series_of({0.5, 1, 2, 3}, {2, 4, 6, 8}, Orientation::HigherIsWorse), exact);
    CHECK(kept.size() == 4);
}

TEST_CASE("AgingCurve validates its points") {
    CHECK_NOTHROW((AgingCurve("c", {{1, 0}, {2, 1}})));
    CHECK_THROWS_AS((AgingCurve("c", {{0, 0}, {2, 1}})), DomainError);
    CHECK_THROWS_AS((AgingCurve("c", {{1, 0}, {1, 1}})), DomainError);
    CHECK_THROWS_AS((AgingCurve("c", {{1, -0.1}, {2, 1}})), DomainError);
    CHECK_THROWS_AS((AgingCurve("c", {{1, 0}, {2, 1.5}})), DomainError);
    CHECK_NOTHROW((AgingCurve::unchecked("c", {{1, 7}, {2, 7}})));
}

TEST_CASE("property: output spans exactly [0, 1]") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = random_values(gen, 2 + static_cast<std::size_t>(trial % 50));
        for (auto o : {Orientation::HigherIsWorse, Orientation::LowerIsWorse}) {
            const auto y = normalize_only(v, o);
            CHECK(*std::min_element(y.begin(), y.end()) == 0.0);
            CHECK(*std::max_element(y.begin(), y.end()) == 1.0);
        }
    }
}

TEST_CASE("property: the most aged sample is the extreme of the series") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = random_values(gen, 30);
        const auto hi = normalize_only(v, Orientation::HigherIsWorse);
        const auto lo = normalize_only(v, Orientation::LowerIsWorse);
        CHECK(std::max_element(hi.begin(), hi.end()) - hi.begin() == std::max_element(v.begin(), v.end()) - v.begin());
        CHECK(std::max_element(lo.begin(), lo.end()) - lo.begin() == std::min_element(v.begin(), v.end()) - v.begin());
    }
}

TEST_CASE("property: normalizing twice") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = random_values(gen, 25);
        const auto hi = normalize_only(v, Orientation::HigherIsWorse);
        CHECK(normalize_only(hi, Orientation::HigherIsWorse) == hi);
        // Lower-is-worse reverses the axis, so applying it twice restores the
        // higher-is-worse view rather than staying fixed.
        const auto lo = normalize_only(v, Orientation::LowerIsWorse);
        const auto lo2 = normalize_only(lo, Orientation::LowerIsWorse);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(lo2[i] == doctest::Approx(hi[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: affine invariance") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    std::uniform_real_distribution<double> shift(-1e3, 1e3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = random_values(gen, 20);
        const double a = scale(gen);
        const double b = shift(gen);
        std::vector<double> w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            w[i] = a * v[i] + b;
        }
        for (auto o : {Orientation::HigherIsWorse, Orientation::LowerIsWorse}) {
            const auto y1 = normalize_only(v, o);
            const auto y2 = normalize_only(w, o);
            for (std::size_t i = 0; i < v.size(); ++i) {
                CHECK(std::abs(y1[i] - y2[i]) <= 1e-10);
            }
        }
    }
}
