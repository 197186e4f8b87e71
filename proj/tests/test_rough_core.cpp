#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rvp/rng.hpp"
#include "rvp/rough_core.hpp"

#include <cmath>
#include <vector>

using namespace rvp;

namespace {

std::vector<double> brownian_increments(std::size_t n, double dt, std::uint64_t seed) {
    GaussianStream g(seed);
    std::vector<double> dw(n);
    const double s = std::sqrt(dt);
    for (auto& x : dw) x = s * g();
    return dw;
}

} // namespace

TEST_CASE("ito_lift on the zero path") {
    auto grid = TimeGrid::uniform(1.0, 3);
    auto rp = ito_lift({0.0, 0.0, 0.0}, grid);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(rp.y[i] == 0.0);
        CHECK(rp.yy0[i] == 0.0);
    }
}

TEST_CASE("ito_lift hand-computed left-point sums") {
    auto grid = TimeGrid::uniform(3.0, 3);
    auto rp = ito_lift({1.0, -2.0, 0.5}, grid);
    CHECK(rp.y == std::vector<double>{0.0, 1.0, -1.0, -0.5});
    CHECK(rp.yy0 == std::vector<double>{0.0, 0.0, -2.0, -2.5});
}

TEST_CASE("ito_lift input validation") {
    auto grid = TimeGrid::uniform(1.0, 3);
    CHECK_THROWS(ito_lift({1.0, 2.0}, grid));
    CHECK_THROWS(ito_lift({1.0, std::nan(""), 0.0}, grid));
}

TEST_CASE("chen defect vanishes on lifted paths") {
    auto grid = TimeGrid::uniform(1.0, 10000);
    auto dw = brownian_increments(10000, 1e-4, 42);
    auto rp = ito_lift(dw, grid);

    double scale = 0.0;
    for (double v : rp.yy0) scale = std::max(scale, std::abs(v));
    GaussianStream pick(7);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        std::size_t a = static_cast<std::size_t>(pick.uniform01() * 10000);
        std::size_t b = static_cast<std::size_t>(pick.uniform01() * 10000);
        std::size_t c = static_cast<std::size_t>(pick.uniform01() * 10000);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        worst = std::max(worst, chen_defect(rp, a, b, c));
    }
    CHECK(worst <= 1e-12 * (1.0 + scale));
}

TEST_CASE("chen residual flags a corrupted window value") {
    auto grid = TimeGrid::uniform(1.0, 4);
    auto rp = ito_lift({0.3, -0.1, 0.2, 0.4}, grid);
    const double good = chen_residual(rp.level2(0, 4), rp.level2(0, 2), rp.level2(2, 4),
                                      rp.level1(0, 2), rp.level1(2, 4));
    CHECK(good <= 1e-15);
    const double bad = chen_residual(rp.level2(0, 4), rp.level2(0, 2) + 1e-3, rp.level2(2, 4),
                                     rp.level1(0, 2), rp.level1(2, 4));
    CHECK(bad > 1e-4);
}

TEST_CASE("chen defect index validation") {
    auto grid = TimeGrid::uniform(1.0, 4);
    auto rp = ito_lift({1, 1, 1, 1}, grid);
    CHECK_THROWS(chen_defect(rp, 2, 1, 3));
    CHECK_THROWS(chen_defect(rp, 0, 1, 9));
}

TEST_CASE("bracket_from_levels telescopes to squared increments") {
    auto grid = TimeGrid::uniform(3.0, 3);
    auto rp = ito_lift({1.0, -2.0, 0.5}, grid);
    auto br = bracket_from_levels(rp);
    CHECK(br.values.back() == doctest::Approx(5.25).epsilon(1e-14));

    auto dw = brownian_increments(5000, 2e-4, 11);
    auto rp2 = ito_lift(dw, TimeGrid::uniform(1.0, 5000));
    auto br2 = bracket_from_levels(rp2);
    double run = 0.0;
    for (std::size_t i = 0; i < dw.size(); ++i) {
        run += dw[i] * dw[i];
        CHECK(std::abs(br2.values[i + 1] - run) <= 1e-12 * (1.0 + run));
    }
}

TEST_CASE("bracket_from_levels is zero for canonical geometric paths") {
    auto grid = TimeGrid::uniform(1.0, 50);
    GaussianStream g(3);
    std::vector<double> y(51), yy0(51);
    y[0] = 0.0;
    for (std::size_t i = 1; i <= 50; ++i) y[i] = y[i - 1] + 0.1 * g();
    for (std::size_t i = 0; i <= 50; ++i) yy0[i] = 0.5 * y[i] * y[i];
    DiscreteRoughPath rp{grid, y, yy0};
    auto br = bracket_from_levels(rp);
    for (double v : br.values) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("bracket_from_rate basics") {
    auto grid = TimeGrid::uniform(1.0, 4);
    auto br = bracket_from_rate({1.0, 1.0, 1.0, 1.0}, grid);
    CHECK(br.values == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(br.root == std::vector<double>{1.0, 1.0, 1.0, 1.0});

    auto zero = bracket_from_rate({0.0, 0.0, 0.0, 0.0}, grid);
    for (double v : zero.values) CHECK(v == 0.0);
    for (double v : zero.root) CHECK(v == 0.0);

    CHECK_THROWS(bracket_from_rate({1.0, -0.5, 1.0, 1.0}, grid));
}

TEST_CASE("bracket_from_rate matches trapezoid integration to first order") {
    // smooth rate, left-point accumulation vs trapezoid oracle
    const std::size_t n = 2000;
    auto grid = TimeGrid::uniform(1.0, n);
    std::vector<double> rate(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = grid[i];
        rate[i] = 0.04 * (1.0 + 0.5 * std::sin(6.0 * t));
    }
    auto br = bracket_from_rate(rate, grid);
    double trap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = grid[i + 1];
        const double r1 = 0.04 * (1.0 + 0.5 * std::sin(6.0 * t1));
        trap += 0.5 * (rate[i] + r1) * grid.dt(i);
    }
    CHECK(std::abs(br.values.back() - trap) < 5.0 / n);
}

TEST_CASE("geometrify satisfies the 1-d symmetric identity on windows") {
    auto grid = TimeGrid::uniform(1.0, 500);
    auto dw = brownian_increments(500, 1.0 / 500, 99);
    auto rp = ito_lift(dw, grid);
    auto lp = make_lifted(grid, rp.y, bracket_from_levels(rp));
    auto g = geometrify(lp);

    GaussianStream pick(13);
    for (int k = 0; k < 200; ++k) {
        std::size_t s = static_cast<std::size_t>(pick.uniform01() * 500);
        std::size_t t = static_cast<std::size_t>(pick.uniform01() * 500);
        if (s > t) std::swap(s, t);
        const double inc = g.level1(s, t);
        CHECK(std::abs(g.level2(s, t) - 0.5 * inc * inc) <= 1e-12 * (1.0 + inc * inc));
    }
}

TEST_CASE("geometrify window example") {
    // Y_{s,t} = 2 with bracket 4 over the step gives YY^g_{s,t} = 2
    auto grid = TimeGrid::uniform(1.0, 1);
    auto lp = make_lifted(grid, {0.0, 2.0}, bracket_from_rate({4.0}, grid));
    CHECK(lp.rp.level2(0, 1) == 0.0);  // 1/2*4 - 1/2*4
    auto g = geometrify(lp);
    CHECK(g.level2(0, 1) == 2.0);
}

TEST_CASE("geometric input is a fixed point of geometrify") {
    auto grid = TimeGrid::uniform(1.0, 20);
    GaussianStream gs(5);
    std::vector<double> y(21);
    for (std::size_t i = 1; i <= 20; ++i) y[i] = y[i - 1] + gs() * 0.2;
    std::vector<double> zero_rate(20, 0.0);
    auto lp = make_lifted(grid, y, bracket_from_rate(zero_rate, grid));
    auto g = geometrify(lp);
    CHECK(g.yy0 == lp.rp.yy0);
}

TEST_CASE("degeometrify inverts geometrify bit-for-bit") {
    auto grid = TimeGrid::uniform(1.0, 3000);
    auto dw = brownian_increments(3000, 1.0 / 3000, 2024);
    auto rp = ito_lift(dw, grid);
    auto lp = make_lifted(grid, rp.y, bracket_from_levels(rp));

    auto back = degeometrify(geometrify(lp), lp.br);
    CHECK(back.y == lp.rp.y);
    CHECK(back.yy0 == lp.rp.yy0);

    // grid mismatch is rejected
    auto other = bracket_from_rate(std::vector<double>(5, 1.0), TimeGrid::uniform(1.0, 5));
    CHECK_THROWS(degeometrify(geometrify(lp), other));
}

TEST_CASE("coarsen identity and constant cases") {
    auto grid = TimeGrid::uniform(1.0, 8);
    auto dw = brownian_increments(8, 0.125, 1);
    auto rp = ito_lift(dw, grid);
    auto lp = make_lifted(grid, rp.y, bracket_from_levels(rp));

    auto same = coarsen(lp, grid);
    CHECK(same.rp.y == lp.rp.y);
    CHECK(same.br.values == lp.br.values);

    std::vector<double> flat(9, 0.7);
    auto lpc = make_lifted(grid, flat, bracket_from_rate(std::vector<double>(8, 0.3), grid));
    auto coarse = coarsen(lpc, TimeGrid::uniform(1.0, 2));
    CHECK(coarse.rp.y == std::vector<double>{0.7, 0.7, 0.7});
    CHECK(coarse.br.values[1] == doctest::Approx(0.15));
    CHECK(coarse.br.values[2] == doctest::Approx(0.3));
}

TEST_CASE("coarsen sums fine increments over each coarse interval") {
    const std::size_t n_fine = 10000, n_coarse = 120;
    auto fine = TimeGrid::uniform(1.0, n_fine);
    auto dw = brownian_increments(n_fine, 1e-4, 314);
    auto rp = ito_lift(dw, fine);
    auto lp = make_lifted(fine, rp.y, bracket_from_levels(rp));

    // 120 does not divide 10000; build the coarse grid from fine nodes
    std::vector<double> nodes;
    for (std::size_t k = 0; k <= n_coarse; ++k)
        nodes.push_back(fine[(k * n_fine) / n_coarse]);
    TimeGrid coarse(nodes);
    auto lc = coarsen(lp, coarse);

    for (std::size_t k = 0; k < n_coarse; ++k) {
        const std::size_t i0 = (k * n_fine) / n_coarse, i1 = ((k + 1) * n_fine) / n_coarse;
        double sy = 0.0, sb = 0.0;
        for (std::size_t i = i0; i < i1; ++i) {
            sy += rp.y[i + 1] - rp.y[i];
            sb += lp.br.values[i + 1] - lp.br.values[i];
        }
        CHECK(std::abs((lc.rp.y[k + 1] - lc.rp.y[k]) - sy) <= 1e-12 * (1.0 + std::abs(sy)));
        CHECK(std::abs((lc.br.values[k + 1] - lc.br.values[k]) - sb) <= 1e-12 * (1.0 + sb));
    }

    auto off_grid = TimeGrid::uniform(1.0, 7);  // nodes not on the fine grid
    CHECK_THROWS(coarsen(lp, off_grid));
}

TEST_CASE("bracket monotonicity tolerance clamps tiny negatives") {
    auto grid = TimeGrid::uniform(1.0, 3);
    // values dip by less than 1e-12 * total
    std::vector<double> y{0.0, 1.0, 1.0, 1.5};
    DiscreteRoughPath rp{grid, y, {0.0, 0.0, 5e-14, 0.25}};
    auto br = bracket_from_levels(rp);  // values = y^2 - 2 yy0
    CHECK(br.clamped == 1);
    CHECK(br.rate[1] == 0.0);

    DiscreteRoughPath bad{grid, y, {0.0, 0.0, 0.3, 0.25}};  // big dip
    CHECK_THROWS(bracket_from_levels(bad));
}

TEST_CASE("holder_estimate basics") {
    auto grid = TimeGrid::uniform(1.0, 64);
    std::vector<double> zero_inc(64, 0.0);
    auto zero = ito_lift(zero_inc, grid);
    auto [a0, b0] = holder_estimate(zero, 0.5);
    CHECK(a0 == 0.0);
    CHECK(b0 == 0.0);

    std::vector<double> lin_inc(64, 1.0 / 64);
    auto lin = ito_lift(lin_inc, grid);
    auto [a1, b1] = holder_estimate(lin, 0.5);
    CHECK(a1 == doctest::Approx(1.0).epsilon(1e-12));  // sup h^{1/2} at the full window

    CHECK_THROWS(holder_estimate(lin, 0.0));
    CHECK_THROWS(holder_estimate(lin, 1.0));
}

TEST_CASE("holder_estimate refinement study on Brownian samples") {
    // above the Brownian exponent the estimate grows with refinement,
    // below it stabilizes
    for (std::uint64_t seed : {101u, 202u, 303u}) {
        const std::size_t n = 4096;
        auto dw = brownian_increments(n, 1.0 / n, seed);
        double prev_low = 0.0, prev_high = 0.0;
        double first_low = 0.0, first_high = 0.0;
        for (std::size_t sub : {512u, 1024u, 2048u, 4096u}) {
            const std::size_t stride = n / sub;
            std::vector<double> inc(sub, 0.0);
            for (std::size_t k = 0; k < sub; ++k)
                for (std::size_t i = 0; i < stride; ++i) inc[k] += dw[k * stride + i];
            auto rp = ito_lift(inc, TimeGrid::uniform(1.0, sub));
            auto [low, l2] = holder_estimate(rp, 0.45);
            auto [high, h2] = holder_estimate(rp, 0.55);
            // grid restriction only adds windows under refinement
            CHECK(low >= prev_low - 1e-12);
            CHECK(high >= prev_high - 1e-12);
            prev_low = low;
            prev_high = high;
            if (sub == 512u) {
                first_low = low;
                first_high = high;
            }
        }
        CHECK(prev_high / first_high > prev_low / first_low);
        CHECK(prev_low / first_low < 1.5);
    }
}
