#pragma once

#include "rvp/lsv_models.hpp"
#include "rvp/rpde_solver.hpp"
#include "rvp/vol_models.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rvp {

/// Knobs of one pricing run.
struct RunConfig {
    std::size_t m_samples = 1000;
    std::size_t n_fine = 2000;   // backbone simulation steps
    std::size_t j_steps = 120;   // pricing time steps
    std::size_t n_space = 90;    // space intervals
    std::optional<std::pair<double, double>> domain;  // empty: model default
    SchemeOrder scheme = SchemeOrder::Order2;
    std::optional<BoundaryKind> boundary;  // empty: model default
    double maturity = 1.0;
    double x0 = 5.0;
    std::uint64_t seed = 1;
    std::size_t inner_m = 20000;  // conditional-SDE oracle paths
    double fd_bump = 0.05;
    std::size_t workers = 0;  // 0: hardware concurrency
};

/// Per-sample values of a curve-valued estimator plus summary statistics.
struct PriceReport {
    std::vector<double> x;
    std::size_t m_samples = 0;
    std::vector<double> values;  // m_samples x x.size(), row-major
    std::vector<double> mean;
    std::vector<double> se;

    double at(std::size_t m, std::size_t k) const { return values[m * x.size() + k]; }
};

struct McValue {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

struct GreeksReport {
    double h = 0.0;
    std::vector<double> x_delta, delta, sigma_delta;
    std::vector<double> x_gamma, gamma, sigma_gamma;
    // per-sample curves, row-major over the x_delta / x_gamma grids
    std::size_t m_samples = 0;
    std::vector<double> delta_samples, gamma_samples;
};

struct VarianceReport {
    std::vector<double> x_price, sigma_price_mc, sigma_price_rpde;
    std::vector<double> x_delta, sigma_delta_mc, sigma_delta_rpde;
    std::vector<double> x_gamma, sigma_gamma_mc, sigma_gamma_rpde;
    double price_ratio = 0.0;
    double delta_ratio = 0.0;
    double gamma_ratio = 0.0;
    bool price_ratio_infinite = false;
    bool delta_ratio_infinite = false;
    bool gamma_ratio_infinite = false;
};

/// Default space domain: additive models get x0 +- 6 sigma sqrt(T) around
/// the backbone scale, multiplicative ones [x0/4, 2.5 x0].
SpaceGrid default_domain(const LSVModel& model, const VolModelSpec& vol, const RunConfig& cfg);

BoundaryKind default_boundary(const LSVModel& model);

/// Pricing time grid as a sub-grid of the fine simulation grid.
TimeGrid pde_time_grid(const TimeGrid& fine, std::size_t j_steps);

/// Euler-Maruyama estimator of E[phi(X_T)] started from each x in xs, with
/// one (W, B) draw per sample shared across all starting points.
PriceReport full_mc_price(const LSVModel& model, const Payoff& payoff, const VolModelSpec& vol,
                          const RunConfig& cfg, const std::vector<double>& xs);

/// Conditional estimator: per backbone sample, one backward solve along the
/// lifted path, evaluated at xs. Backbone seeds match full_mc_price.
PriceReport partial_mc_price(const LSVModel& model, const Payoff& payoff,
                             const VolModelSpec& vol, const RunConfig& cfg,
                             const std::vector<double>& xs);

/// One sample of the conditional pipeline: backbone -> lift -> coarsen ->
/// solve. Exposed for oracle studies.
struct SamplePipeline {
    VolSample backbone;
    LiftedPath fine_lift;
    LiftedPath driver;  // on the pricing grid
    RPDEField field;
};
SamplePipeline run_sample_pipeline(const LSVModel& model, const Payoff& payoff,
                                   const VolModelSpec& vol, const RunConfig& cfg,
                                   std::size_t sample_index);

/// Euler estimate of the conditional price under a frozen driver, with the
/// drift split f0 V dt + f dY and diffusion g v^Y dB.
McValue conditional_sde_price(const LSVModel& model, const Payoff& payoff,
                              const LiftedPath& frozen, double x0, std::size_t inner_m,
                              std::uint64_t seed);

/// Finite-difference Greeks from a curve report whose x-grid spacing is h.
GreeksReport greeks_fd(const PriceReport& report, double h);

/// Pointwise sample standard deviations and max-norm ratios for price and
/// finite-difference Greeks of the two estimators.
VarianceReport variance_ratios(const PriceReport& full, const PriceReport& partial, double h);

/// (1/M) sum ||ref_m - fd_m||_2 / ||ref_m||_2 over per-sample curves.
double strong_relative_error(const std::vector<std::vector<double>>& fd_rows,
                             const std::vector<std::vector<double>>& ref_rows);

struct ConvergenceResult {
    std::vector<std::size_t> n_space;
    std::vector<double> eps_order1;
    std::vector<double> eps_order2;
};

/// Strong-error study over space refinements at fixed pricing time step.
/// Reference per sample: conditional closed form where available, otherwise
/// the conditional-SDE oracle on the finest grid.
ConvergenceResult convergence_study(const LSVModel& model, const Payoff& payoff,
                                    const VolModelSpec& vol, const RunConfig& cfg,
                                    const std::vector<std::size_t>& n_space_list);

} // namespace rvp
