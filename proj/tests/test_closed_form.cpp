#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rvp/closed_form.hpp"
#include "rvp/rng.hpp"

#include <cmath>

using namespace rvp;

namespace {

// brute-force trapezoid quadrature of payoff against the Gaussian kernel
double trapezoid_gaussian(const std::function<double(double)>& f, double mean, double stdev,
                          std::size_t n_points) {
    const double lo = mean - 14.0 * stdev, hi = mean + 14.0 * stdev;
    const double h = (hi - lo) / static_cast<double>(n_points);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n_points; ++i) {
        const double y = lo + h * static_cast<double>(i);
        const double w = (i == 0 || i == n_points) ? 0.5 : 1.0;
        acc += w * f(y) * normal_pdf((y - mean) / stdev);
    }
    return acc * h / stdev;
}

// same kernel in log space for the lognormal conditional law
double trapezoid_lognormal(const std::function<double(double)>& f, double x, double log_mean,
                           double stdev, std::size_t n_points) {
    return trapezoid_gaussian([&](double z) { return f(x * std::exp(z)); }, log_mean, stdev,
                              n_points);
}

Payoff one_payoff() { return Payoff::sampled({0.0, 1.0}, {1.0, 1.0}); }
Payoff linear_payoff() { return Payoff::sampled({0.0, 1.0}, {0.0, 1.0}); }

} // namespace

TEST_CASE("normal cdf sanity") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("gauss-hermite handles polynomials exactly") {
    auto sq = [](double z) { return z * z; };
    CHECK(gaussian_expectation(sq, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
    auto mixed = [](double z) { return 1.0 + 3.0 * z + z * z * z; };
    CHECK(gaussian_expectation(mixed, 0.5, 1.0) ==
          doctest::Approx(1.0 + 3.0 * 0.5 + (0.125 + 3.0 * 0.5)).epsilon(1e-12));
}

TEST_CASE("rt normalization over parameter draws") {
    GaussianStream g(17);
    auto one = one_payoff();
    for (int i = 0; i < 50; ++i) {
        const double x = 1.0 + 9.0 * g.uniform01();
        const double rho = -1.0 + 2.0 * g.uniform01();
        const double y = 0.5 * g();
        const double br = 0.5 * g.uniform01() + 1e-6;
        CHECK(rt_bachelier(one, x, rho, y, br) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rt_blackscholes(one, x, rho, y, br) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rt conditional moment identities") {
    auto lin = linear_payoff();
    GaussianStream g(23);
    for (int i = 0; i < 50; ++i) {
        const double x = 1.0 + 9.0 * g.uniform01();
        const double rho = -0.95 + 1.9 * g.uniform01();
        const double y = 0.3 * g();
        const double br = 0.4 * g.uniform01() + 1e-6;
        CHECK(rt_bachelier(lin, x, rho, y, br) ==
              doctest::Approx(x + rho * y).epsilon(1e-10));
        CHECK(rt_blackscholes(lin, x, 0.0, y, br) == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("rt_bachelier put matches brute-force quadrature of the density") {
    auto put = Payoff::put(5.0);
    const double x = 5.0, rho = -0.4, y = 0.1, br = 0.04;
    const double mean = x + rho * y;
    const double stdev = std::sqrt((1.0 - rho * rho) * br);
    const double oracle =
        trapezoid_gaussian([&](double v) { return put(v); }, mean, stdev, 1000000);
    CHECK(rt_bachelier(put, x, rho, y, br) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("rt_blackscholes put matches brute-force quadrature of the density") {
    auto put = Payoff::put(5.0);
    const double x = 5.0, rho = -0.4, y = 0.1, br = 0.04;
    const double log_mean = rho * y - 0.5 * br;
    const double stdev = std::sqrt((1.0 - rho * rho) * br);
    const double oracle =
        trapezoid_lognormal([&](double v) { return put(v); }, x, log_mean, stdev, 1000000);
    CHECK(rt_blackscholes(put, x, rho, y, br) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("degenerate correlation collapses to a point mass") {
    auto put = Payoff::put(5.0);
    CHECK(rt_bachelier(put, 5.0, 1.0, -0.3, 0.1) == put(5.0 - 0.3));
    CHECK(rt_bachelier(put, 5.0, -1.0, 0.2, 0.1) == put(5.0 - 0.2));
    const double v = rt_blackscholes(put, 5.0, 1.0, 0.2, 0.1);
    CHECK(v == put(5.0 * std::exp(0.2 - 0.05)));
}

TEST_CASE("put value is monotone in spot and bracket") {
    auto put = Payoff::put(5.0);
    GaussianStream g(31);
    for (int i = 0; i < 100; ++i) {
        const double x = 2.0 + 6.0 * g.uniform01();
        const double rho = -0.9 + 1.8 * g.uniform01();
        const double y = 0.2 * g();
        const double br = 0.3 * g.uniform01() + 1e-4;
        const double base = rt_bachelier(put, x, rho, y, br);
        CHECK(rt_bachelier(put, x + 0.1, rho, y, br) <= base + 1e-12);
        CHECK(rt_bachelier(put, x, rho, y, br * 1.2) >= base - 1e-12);
        const double base_bs = rt_blackscholes(put, x, rho, y, br);
        CHECK(rt_blackscholes(put, x + 0.1, rho, y, br) <= base_bs + 1e-12);
        CHECK(rt_blackscholes(put, x, rho, y, br * 1.2) >= base_bs - 1e-12);
    }
}

TEST_CASE("heat solution") {
    auto put = Payoff::put(5.0);
    CHECK(heat_solution(put, 4.2, 0.0) == put(4.2));
    CHECK(heat_solution(put, 4.2, 0.03) ==
          doctest::Approx(rt_bachelier(put, 4.2, 0.0, 0.0, 0.03)).epsilon(1e-12));

    // Gaussian bump payoff has a closed-form convolution
    const double c = 5.0, tau = 0.3;
    std::vector<double> xs, vals;
    for (int i = 0; i <= 400; ++i) {
        const double xx = 2.0 + 6.0 * i / 400.0;
        xs.push_back(xx);
        vals.push_back(std::exp(-0.5 * (xx - c) * (xx - c) / (tau * tau)));
    }
    const double x0 = 4.8, var = 0.04;
    const double expected = tau / std::sqrt(tau * tau + var) *
                            std::exp(-0.5 * (x0 - c) * (x0 - c) / (tau * tau + var));
    auto bump = [&](double y) { return std::exp(-0.5 * (y - c) * (y - c) / (tau * tau)); };
    CHECK(gaussian_expectation(bump, x0, var) == doctest::Approx(expected).epsilon(1e-10));

    CHECK_THROWS(heat_solution(put, 4.2, -0.1));
}

TEST_CASE("plain pricers") {
    auto put = Payoff::put(5.0);
    CHECK(plain_bachelier(put, 4.0, 0.0, 1.0) == 1.0);
    CHECK(plain_black_scholes(put, 6.0, 0.0, 1.0) == 0.0);

    // ATM Bachelier put = vol * sqrt(T / (2 pi))
    const double vol = 0.3, T = 2.0;
    CHECK(plain_bachelier(put, 5.0, vol, T) ==
          doctest::Approx(vol * std::sqrt(T / (2.0 * M_PI))).epsilon(1e-12));

    // BS put at the money forward: parity gives call = put
    auto call = Payoff::call(5.0);
    const double p = plain_black_scholes(put, 5.0, 0.2, 1.0);
    const double cc = plain_black_scholes(call, 5.0, 0.2, 1.0);
    CHECK(p == doctest::Approx(cc).epsilon(1e-12));
    const double oracle = trapezoid_lognormal([&](double v) { return put(v); }, 5.0,
                                              -0.5 * 0.04, 0.2, 1000000);
    CHECK(p == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("high quadrature orders stay finite and accurate") {
    // a kinked sampled payoff forces the order doubling to the top; the
    // scaled Hermite recurrence must not overflow there
    std::vector<double> xs, vals;
    for (int i = 0; i <= 2000; ++i) {
        const double x = 10.0 * i / 2000.0;
        xs.push_back(x);
        vals.push_back(std::max(5.0 - x, 0.0));
    }
    auto sampled_put = Payoff::sampled(xs, vals);
    const double via_sampled = rt_blackscholes(sampled_put, 5.0, -0.4, 0.1, 0.04);
    const double via_closed = rt_blackscholes(Payoff::put(5.0), 5.0, -0.4, 0.1, 0.04);
    CHECK(std::isfinite(via_sampled));
    CHECK(via_sampled == doctest::Approx(via_closed).epsilon(5e-5));
}

TEST_CASE("input validation") {
    auto put = Payoff::put(5.0);
    CHECK_THROWS(rt_bachelier(put, 5.0, -0.4, 0.0, -0.1));
    CHECK_THROWS(rt_bachelier(put, 5.0, -1.4, 0.0, 0.1));
    CHECK_THROWS(rt_blackscholes(put, -5.0, -0.4, 0.0, 0.1));
}
