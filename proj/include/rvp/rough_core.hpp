#pragma once

#include "rvp/time_grid.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace rvp {

/// Scalar rough path sampled on a grid. Stores the level-1 values Y_{t_i}
/// and the anchored level-2 values YY_{0,t_i}; window values are
/// reconstructed through Chen's relation, so the relation holds for every
/// grid triple by construction.
struct DiscreteRoughPath {
    TimeGrid grid;
    std::vector<double> y;    // Y_{t_i}, y[0] = 0 for lifts started at 0
    std::vector<double> yy0;  // YY_{0,t_i}, yy0[0] = 0

    double level1(std::size_t s, std::size_t t) const { return y[t] - y[s]; }
    double level2(std::size_t s, std::size_t t) const {
        return yy0[t] - yy0[s] - y[s] * (y[t] - y[s]);
    }
};

/// Non-decreasing bracket path with per-step rate and its square root.
struct BracketPath {
    TimeGrid grid;
    std::vector<double> values;  // [Y]_{t_i}, values[0] = 0
    std::vector<double> rate;    // per step, units 1/time
    std::vector<double> root;    // sqrt(rate) per step
    std::size_t clamped = 0;     // steps whose tiny negative increment was zeroed

    double increment(std::size_t i) const { return values[i + 1] - values[i]; }
    double total() const { return values.back() - values.front(); }
};

/// Rough path together with a declared non-decreasing Lipschitz bracket.
/// The stored level 2 is always the one induced by (level 1, bracket):
/// YY_{0,t} = Y_{0,t}^2/2 - [Y]_t/2, which keeps geometrification and its
/// inverse exact inverses of each other.
struct LiftedPath {
    DiscreteRoughPath rp;
    BracketPath br;
};

// construction -----------------------------------------------------------

/// Level-1 path from increments plus the left-point (Ito) level 2.
DiscreteRoughPath ito_lift(const std::vector<double>& increments, const TimeGrid& grid);

/// Bracket read off the two levels: [Y]_t = Y_{0,t}^2 - 2 YY_{0,t}.
/// For an Ito lift this telescopes to the running sum of squared increments.
BracketPath bracket_from_levels(const DiscreteRoughPath& rp);

/// Bracket accumulated from a nonnegative per-step rate V: [Y]_i = sum V_k dt_k.
BracketPath bracket_from_rate(const std::vector<double>& rate_per_step, const TimeGrid& grid);

/// Pair a level-1 path with a bracket; level 2 is normalized to
/// YY = Y^2/2 - [Y]/2 (the unique lift with canonical geometric part).
LiftedPath make_lifted(const TimeGrid& grid, std::vector<double> y, BracketPath br);

// operations -------------------------------------------------------------

/// Weakly geometric second level. In one dimension YY + d[Y]/2 collapses to
/// Y_{0,t}^2/2 regardless of the stored anchors.
DiscreteRoughPath geometrify(const LiftedPath& lp);

/// Inverse of geometrify for a given bracket: YY = YY^g - d[Y]/2.
DiscreteRoughPath degeometrify(const DiscreteRoughPath& geometric, const BracketPath& br);

/// Restriction of a lifted path to a sub-grid. Level 1 and bracket are
/// subsampled; level 2 is rebuilt canonically on the coarse grid.
LiftedPath coarsen(const LiftedPath& lp, const TimeGrid& coarse);

/// Chen residual |YY_{s,t} - YY_{s,u} - YY_{u,t} - Y_{s,u} Y_{u,t}| for grid
/// indices s <= u <= t. Zero to rounding for any path built by this module.
double chen_defect(const DiscreteRoughPath& rp, std::size_t s, std::size_t u, std::size_t t);

/// Residual on raw window values; lets checkers exercise corrupted inputs.
double chen_residual(double yy_st, double yy_su, double yy_ut, double y_su, double y_ut);

/// Grid-restricted estimators of the alpha-Hoelder norms of (Y, YY).
/// Lower bounds of the continuum norms; diagnostic only.
std::pair<double, double> holder_estimate(const DiscreteRoughPath& rp, double alpha);

/// Tolerance for bracket monotonicity: 1e-12 times the total bracket.
double bracket_mono_tol(double bracket_total);

} // namespace rvp
