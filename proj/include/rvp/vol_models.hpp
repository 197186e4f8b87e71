#pragma once

#include "rvp/rough_core.hpp"
#include "rvp/time_grid.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rvp {

/// Volatility backbone specification: constant, or rough Bergomi
/// v_t = xi0 * E(eta X_t) with X the Riemann-Liouville kernel process
/// (t-s)^{H-1/2} driven by W.
struct VolModelSpec {
    enum class Kind { Constant, RoughBergomi };
    Kind kind = Kind::Constant;
    double vbar = 0.2;    // Constant
    double xi0 = 0.0;     // RoughBergomi
    double eta = 0.0;
    double hurst = 0.5;
    std::optional<double> v_cap;  // optional truncation of v, off by default

    static VolModelSpec constant(double vbar);
    static VolModelSpec rough_bergomi(double xi0, double eta, double hurst);
};

/// One simulated backbone path on the fine grid.
struct VolSample {
    TimeGrid grid;
    std::vector<double> v;   // per node
    std::vector<double> V;   // v^2 per node
    std::vector<double> dW;  // per step
    std::vector<double> I;   // I_0 = 0, left-point accumulation of v dW
    double v_max = 0.0;
    std::size_t truncated = 0;  // nodes capped by v_cap
};

/// Largest fine grid accepted by the exact-covariance simulation.
inline constexpr std::size_t kVolterraMaxSteps = 2000;

/// Joint covariance of (X_{t_1..t_N}, dW_1..dW_N), dimension 2N, row-major.
/// Kernel covariances are integrated by per-cell Gauss-Legendre panels with
/// the singular first cell transformed; increments use the closed form.
std::vector<double> volterra_covariance(const TimeGrid& grid, double hurst);

/// In-place lower Cholesky with the jitter policy: on a failed pivot, add
/// 1e-12 * trace / n to the diagonal, at most `max_jitter` times.
void cholesky_factor(std::vector<double>& matrix, std::size_t n, int max_jitter = 3);

/// Simulate the backbone jointly with its driving increments.
VolSample simulate_backbone(const VolModelSpec& spec, const TimeGrid& grid, std::uint64_t seed);

/// Package a sample as the lifted path of I with bracket int V dt.
LiftedPath integrate_vol(const VolSample& sample);

} // namespace rvp
