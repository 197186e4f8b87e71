#pragma once

#include "rvp/lsv_models.hpp"

#include <functional>

namespace rvp {

double normal_pdf(double x);
double normal_cdf(double x);

/// E[f(Z)] for Z ~ N(mean, var), by adaptive Gauss-Hermite quadrature
/// (order doubling 16 -> 1024, relative stopping 1e-10).
double gaussian_expectation(const std::function<double(double)>& f, double mean, double var,
                            double rel_tol = 1e-10);

/// Undiscounted Bachelier prices for terminal law N(mean, stdev^2).
double bachelier_put(double mean, double stdev, double strike);
double bachelier_call(double mean, double stdev, double strike);

/// Undiscounted Black prices for lognormal terminal law with forward fwd
/// and total volatility stdev (stdev = s means ln X ~ N(ln fwd - s^2/2, s^2)).
double black_put(double fwd, double stdev, double strike);
double black_call(double fwd, double stdev, double strike);

/// Conditional price for the Bachelier-form SV model: given the driver data
/// (y_tT, br_tT) over [t, T], the conditional law of X_T is
/// N(x + rho y_tT, (1 - rho^2) br_tT).
double rt_bachelier(const Payoff& payoff, double x, double rho, double y_tT, double br_tT);

/// Conditional price for the Black-Scholes-form SV model: the conditional
/// law of ln(X_T / x) is N(rho y_tT - br_tT / 2, (1 - rho^2) br_tT).
double rt_blackscholes(const Payoff& payoff, double x, double rho, double y_tT, double br_tT);

/// Solution of the backward heat equation with total variance var_tT,
/// i.e. the Gaussian convolution of the payoff. Equals rt_bachelier with
/// rho = 0.
double heat_solution(const Payoff& payoff, double x, double var_tT);

/// Textbook pricers used as oracles for constant-volatility runs.
double plain_bachelier(const Payoff& payoff, double spot, double vol, double maturity);
double plain_black_scholes(const Payoff& payoff, double spot, double vol, double maturity);

} // namespace rvp
