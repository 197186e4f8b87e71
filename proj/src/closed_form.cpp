#include "rvp/closed_form.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rvp {

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244008444); }

namespace {

struct HermiteRule {
    std::vector<double> z;
    std::vector<double> w;  // weight e^{-z^2}
};

// Orthonormal Hermite recurrence at z, renormalized so the values never
// overflow (they grow like e^{z^2/2} at the extremes). Returns p_n, p_{n-1},
// the tracked log scale, and the Sturm count of sign changes, which equals
// the number of roots of p_n below z.
struct HermiteEval {
    double pn;
    double pnm1;
    double log_scale;
    std::size_t roots_above;
};

HermiteEval hermite_eval(std::size_t n, double z) {
    const double pim4 = 0.7511255444649424828587030;  // pi^{-1/4}
    double p1 = pim4, p2 = 0.0, ls = 0.0;
    std::size_t cnt = 0;
    bool prev_neg = false;  // sign of p_0 is +
    for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
        const bool neg = std::signbit(p1) && p1 != 0.0;
        if (neg != prev_neg) ++cnt;
        prev_neg = neg;
        if (std::abs(p1) > 1e120) {
            p1 *= 1e-120;
            p2 *= 1e-120;
            ls += 120.0 * 2.302585092994045684;
        }
    }
    return {p1, p2, ls, cnt};
}

// Nodes/weights for \int f(z) e^{-z^2} dz: every root is isolated by
// bisection on the Sturm count, then polished by Newton. Robust for the
// full doubling ladder up to n = 1024.
HermiteRule build_hermite(std::size_t n) {
    HermiteRule rule;
    rule.z.resize(n);
    rule.w.resize(n);
    const std::size_t m = n / 2;  // orders are powers of two, always even
    const double zmax = std::sqrt(2.0 * n + 1.0) + 2.0;

    for (std::size_t k = 0; k < m; ++k) {
        // k-th positive root in ascending order: exactly m - 1 - k roots above it
        const std::size_t above = m - 1 - k;
        double lo = 0.0, hi = zmax;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hermite_eval(n, mid).roots_above <= above)
                hi = mid;
            else
                lo = mid;
        }
        double z = 0.5 * (lo + hi);
        HermiteEval e = hermite_eval(n, z);
        for (int it = 0; it < 8; ++it) {
            const double pp = std::sqrt(2.0 * n) * e.pnm1;
            const double dz = e.pn / pp;
            z -= dz;
            e = hermite_eval(n, z);
            if (std::abs(dz) <= 1e-16 * (1.0 + std::abs(z))) break;
        }
        const double pp = std::sqrt(2.0 * n) * e.pnm1;
        const double log_w = std::log(2.0) - 2.0 * (std::log(std::abs(pp)) + e.log_scale);
        rule.z[m + k] = z;
        rule.z[m - 1 - k] = -z;
        rule.w[m + k] = std::exp(log_w);
        rule.w[m - 1 - k] = rule.w[m + k];
    }
    return rule;
}

const HermiteRule& hermite_rule(std::size_t n) {
    static std::map<std::size_t, HermiteRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
    return it->second;
}

double hermite_apply(const std::function<double(double)>& f, double mean, double stdev,
                     std::size_t n) {
    static const double inv_sqrt_pi = 0.5641895835477562869480795;
    const HermiteRule& rule = hermite_rule(n);
    const double c = stdev * 1.4142135623730950488016887;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += rule.w[i] * f(mean + c * rule.z[i]);
    return acc * inv_sqrt_pi;
}

} // namespace

double gaussian_expectation(const std::function<double(double)>& f, double mean, double var,
                            double rel_tol) {
    if (!(var >= 0.0)) throw std::invalid_argument("gaussian_expectation: variance >= 0");
    if (var == 0.0) return f(mean);
    const double stdev = std::sqrt(var);
    double prev = hermite_apply(f, mean, stdev, 16);
    for (std::size_t n = 32; n <= 1024; n *= 2) {
        const double cur = hermite_apply(f, mean, stdev, n);
        if (std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

double bachelier_put(double mean, double stdev, double strike) {
    if (stdev <= 0.0) return std::max(strike - mean, 0.0);
    const double d = (strike - mean) / stdev;
    return (strike - mean) * normal_cdf(d) + stdev * normal_pdf(d);
}

double bachelier_call(double mean, double stdev, double strike) {
    if (stdev <= 0.0) return std::max(mean - strike, 0.0);
    const double d = (mean - strike) / stdev;
    return (mean - strike) * normal_cdf(d) + stdev * normal_pdf(d);
}

double black_put(double fwd, double stdev, double strike) {
    if (stdev <= 0.0) return std::max(strike - fwd, 0.0);
    const double d1 = (std::log(fwd / strike) + 0.5 * stdev * stdev) / stdev;
    return strike * normal_cdf(-(d1 - stdev)) - fwd * normal_cdf(-d1);
}

double black_call(double fwd, double stdev, double strike) {
    if (stdev <= 0.0) return std::max(fwd - strike, 0.0);
    const double d1 = (std::log(fwd / strike) + 0.5 * stdev * stdev) / stdev;
    return fwd * normal_cdf(d1) - strike * normal_cdf(d1 - stdev);
}

namespace {

// Closed forms apply to the pure put/call; payoff smoothing only alters the
// function on x < 0, so it is priced by quadrature when the law reaches
// below zero.
bool negative_region_matters(const Payoff& p, double mean, double stdev) {
    return p.smoothing() > 0.0 && mean - 10.0 * stdev < 0.0;
}

double gaussian_payoff_value(const Payoff& payoff, double mean, double var) {
    const double stdev = std::sqrt(var);
    switch (payoff.kind()) {
        case Payoff::Kind::Put:
            if (!negative_region_matters(payoff, mean, stdev))
                return bachelier_put(mean, stdev, payoff.strike());
            break;
        case Payoff::Kind::Call:
            return bachelier_call(mean, stdev, payoff.strike());
        case Payoff::Kind::Sampled:
            break;
    }
    return gaussian_expectation([&](double y) { return payoff(y); }, mean, var);
}

} // namespace

double rt_bachelier(const Payoff& payoff, double x, double rho, double y_tT, double br_tT) {
    if (!(br_tT >= 0.0)) throw std::invalid_argument("rt_bachelier: bracket increment >= 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rt_bachelier: |rho| <= 1");
    const double mean = x + rho * y_tT;
    const double var = (1.0 - rho * rho) * br_tT;
    if (var == 0.0) return payoff(mean);
    return gaussian_payoff_value(payoff, mean, var);
}

double rt_blackscholes(const Payoff& payoff, double x, double rho, double y_tT, double br_tT) {
    if (!(x > 0.0)) throw std::invalid_argument("rt_blackscholes: spot > 0");
    if (!(br_tT >= 0.0)) throw std::invalid_argument("rt_blackscholes: bracket increment >= 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rt_blackscholes: |rho| <= 1");
    const double log_mean = rho * y_tT - 0.5 * br_tT;
    const double var = (1.0 - rho * rho) * br_tT;
    const double fwd = x * std::exp(log_mean + 0.5 * var);
    const double stdev = std::sqrt(var);
    if (var == 0.0) return payoff(x * std::exp(log_mean));
    switch (payoff.kind()) {
        case Payoff::Kind::Put:
            return black_put(fwd, stdev, payoff.strike());
        case Payoff::Kind::Call:
            return black_call(fwd, stdev, payoff.strike());
        case Payoff::Kind::Sampled:
            return gaussian_expectation(
                [&](double z) { return payoff(x * std::exp(z)); }, log_mean, var);
    }
    throw std::logic_error("rt_blackscholes: unknown payoff kind");
}

double heat_solution(const Payoff& payoff, double x, double var_tT) {
    if (!(var_tT >= 0.0)) throw std::invalid_argument("heat_solution: variance >= 0");
    if (var_tT == 0.0) return payoff(x);
    return gaussian_payoff_value(payoff, x, var_tT);
}

double plain_bachelier(const Payoff& payoff, double spot, double vol, double maturity) {
    return rt_bachelier(payoff, spot, 0.0, 0.0, vol * vol * maturity);
}

double plain_black_scholes(const Payoff& payoff, double spot, double vol, double maturity) {
    return rt_blackscholes(payoff, spot, 0.0, 0.0, vol * vol * maturity);
}

} // namespace rvp
