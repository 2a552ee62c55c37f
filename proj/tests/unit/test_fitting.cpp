#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "agingkit/error.hpp"
#include "agingkit/fitting.hpp"
#include "oracles.hpp"

using namespace agingkit;

TEST_CASE("rmse examples") {
    CHECK(rmse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 1.0);
    CHECK(rmse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) == std::sqrt(1.0 / 3.0));
    CHECK_THROWS_AS((rmse(std::vector<double>{1}, std::vector<double>{1, 2})), DomainError);
    CHECK_THROWS_AS((rmse(std::vector<double>{}, std::vector<double>{})), DomainError);
}

TEST_CASE("r_square examples") {
    const std::vector<double> obs{1, 2, 3};
    CHECK(r_square(obs, obs) == 1.0);
    CHECK(r_square(obs, std::vector<double>{2, 2, 2}) == 0.0);
    CHECK(r_square(obs, std::vector<double>{1, 2, 4}) == 0.5);
    CHECK(r_square(obs, std::vector<double>{-1, -2, -3}) < 0.0);
    CHECK_THROWS_AS((r_square(std::vector<double>{4, 4, 4}, obs)), DomainError);
    CHECK_THROWS_AS((r_square(obs, std::vector<double>{1, 2})), DomainError);
}

TEST_CASE("noiseless TPC-W row is recovered tightly") {
    std::vector<double> t;
    for (int i = 1; i <= 100; ++i) {
        t.push_back(0.1 * i);
    }
    const auto y = oracle::eq11_samples(0.4504, 1.09e-9, 0.6693, t);
    const auto r = fit(t, y);
    CHECK(r.converged);
    CHECK(oracle::relative_error(r.model.K, 0.4504) <= 1e-6);
    CHECK(std::abs(r.model.alpha - 1.09e-9) <= 1e-6);
    CHECK(oracle::relative_error(r.model.beta, 0.6693) <= 1e-6);
    CHECK(r.r_square == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.n_samples == 100);
}

TEST_CASE("noisy w2 row: at least 18 of 20 seeds within tolerance") {
    const auto t = oracle::open_grid(500, 10.0);
    const auto clean = oracle::eq11_samples(0.06, 0.0294, 1.858, t);
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto r = fit(t, oracle::with_noise(clean, 0.02, seed));
        const bool ok = oracle::relative_error(r.model.K, 0.06) <= 0.1 &&
                        oracle::relative_error(r.model.beta, 1.858) <= 0.1 &&
                        std::abs(r.model.alpha - 0.0294) <= 0.01 && r.r_square >= 0.99;
        good += ok ? 1 : 0;
    }
    CHECK(good >= 18);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS((fit(std::vector<double>{1, 2, 3}, std::vector<double>{0.1, 0.2, 0.3})), DomainError);
    const auto flat = AgingCurve::unchecked("flat", {{1, 0.4}, {2, 0.4}, {3, 0.4}, {4, 0.4}, {5, 0.4}});
    try {
        fit(flat);
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("degenerate curve") != std::string::npos);
    }
    // Only two samples above the floor: the log-space start is impossible.
    CHECK_THROWS_AS((fit(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{0, 0, 0, 0.5, 1})), DomainError);
    CHECK_THROWS_AS((fit(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0.1, 0.2, 0.3, 0.4})), DomainError);
}

TEST_CASE("iteration budget exhaustion is reported, not thrown") {
    const auto t = oracle::open_grid(200, 10.0);
    const auto y = oracle::with_noise(oracle::eq11_samples(0.06, 0.0294, 1.858, t), 0.02, 3);
    FitOptions opts;
    opts.max_iterations = 1;
    const auto r = fit(t, y, opts);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(std::isfinite(r.model.K));
}

TEST_CASE("report CSV row") {
    FitReport r;
    r.name = "web,server\nA";
    r.model = {0.5, 0.25, 2};
    r.rmse = 0.125;
    r.r_square = 0.75;
    CHECK(format_fit_row(r) == "web_server_A,0.5,0.25,2,0.125,0.75");
    std::ostringstream out;
    const std::vector<FitReport> rows{r, r};
    write_fit_report(out, rows);
    CHECK(out.str() == "name,K,alpha,beta,rmse,r_square\nweb_server_A,0.5,0.25,2,0.125,0.75\n"
                       "web_server_A,0.5,0.25,2,0.125,0.75\n");
}

TEST_CASE("property: noiseless round trip over Table-1-like ranges") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> K(0.05, 0.6);
    std::uniform_real_distribution<double> alpha(0.0, 0.5);
    std::uniform_real_distribution<double> beta(0.0, 2.5);
    const auto t = oracle::open_grid(200, 10.0);
    for (int trial = 0; trial < 60; ++trial) {
        const double k = K(gen);
        const double a = alpha(gen);
        const double b = beta(gen);
        const auto r = fit(t, oracle::eq11_samples(k, a, b, t));
        CAPTURE(k);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(r.converged);
        CHECK(oracle::relative_error(r.model.K, k) <= 1e-4);
        CHECK(std::abs(r.model.alpha - a) <= 1e-4);
        CHECK(oracle::relative_error(r.model.beta, b) <= 1e-4);
    }
}

TEST_CASE("property: reported metrics are consistent with the fitted model") {
    const auto t = oracle::open_grid(300, 10.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto y = oracle::with_noise(oracle::eq11_samples(0.2, 0.1, 1.1, t), 0.05, seed);
        const auto r = fit(t, y);
        std::vector<double> pred(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            pred[i] = eval_model(r.model, t[i]);
        }
        CHECK(r.rmse == rmse(y, pred));
        CHECK(r.r_square == r_square(y, pred));
        CHECK(r.rmse >= 0.0);
        CHECK(r.r_square <= 1.0);
        CHECK(r.iterations <= 200);
        CHECK_NOTHROW((r.model.validate()));
    }
}

TEST_CASE("property: accepted steps never increase the objective") {
    const auto t = oracle::open_grid(300, 10.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto y = oracle::with_noise(oracle::eq11_samples(0.3, 0.05, 0.9, t), 0.1, seed);
        const auto r = fit(t, y);
        REQUIRE(!r.objective_history.empty());
        for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
            CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
        }
    }
}

TEST_CASE("property: refitting the model's own predictions is a fixed point") {
    const auto t = oracle::open_grid(250, 10.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto y = oracle::with_noise(oracle::eq11_samples(0.45, 0.07, 0.43, t), 0.03, seed);
        const auto first = fit(t, y);
        std::vector<double> pred(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            pred[i] = eval_model(first.model, t[i]);
        }
        const auto second = fit(t, pred);
        CHECK(oracle::relative_error(second.model.K, first.model.K) <= 1e-8);
        CHECK(std::abs(second.model.alpha - first.model.alpha) <= 1e-8);
        CHECK(std::abs(second.model.beta - first.model.beta) <= 1e-8 * std::max(1.0, first.model.beta));
    }
}

TEST_CASE("bounds hold when the data prefer negative rates") {
    // Decaying data: the unconstrained optimum has alpha < 0.
    const auto t = oracle::open_grid(100, 5.0);
    const auto y = oracle::eq11_samples(1.0, -0.5, 0.2, t);
    const auto r = fit(t, y);
    CHECK(r.model.alpha >= 0.0);
    CHECK(r.model.beta >= 0.0);
    CHECK(r.model.K > 0.0);
}
