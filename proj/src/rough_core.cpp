#include "rvp/rough_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rvp {

namespace {

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

// Shared by make_lifted and degeometrify so the two stay bit-identical.
std::vector<double> levels_from_bracket(const std::vector<double>& y,
                                        const std::vector<double>& bracket) {
    std::vector<double> yy0(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        yy0[i] = 0.5 * (y[i] * y[i]) - 0.5 * bracket[i];
    return yy0;
}

} // namespace

double bracket_mono_tol(double bracket_total) {
    return 1e-12 * std::abs(bracket_total);
}

DiscreteRoughPath ito_lift(const std::vector<double>& increments, const TimeGrid& grid) {
    if (increments.size() != grid.n_steps())
        throw std::invalid_argument("ito_lift: increments length must be grid steps");
    for (double d : increments)
        if (!std::isfinite(d)) throw std::invalid_argument("ito_lift: non-finite increment");

    DiscreteRoughPath rp;
    rp.grid = grid;
    rp.y.resize(grid.size());
    rp.yy0.resize(grid.size());
    rp.y[0] = 0.0;
    rp.yy0[0] = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        rp.y[i + 1] = rp.y[i] + increments[i];
        rp.yy0[i + 1] = rp.yy0[i] + rp.y[i] * increments[i];
    }
    return rp;
}

namespace {

BracketPath finish_bracket(TimeGrid grid, std::vector<double> values) {
    BracketPath bp;
    bp.grid = std::move(grid);
    bp.values = std::move(values);
    const double tol = bracket_mono_tol(bp.values.back() - bp.values.front());
    bp.rate.resize(bp.values.size() - 1);
    bp.root.resize(bp.values.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.values.size(); ++i) {
        double incr = bp.values[i + 1] - bp.values[i];
        if (incr < -tol)
            throw std::runtime_error("bracket: decreasing beyond tolerance at step " +
                                     std::to_string(i));
        if (incr < 0.0) {
            incr = 0.0;
            ++bp.clamped;
        }
        bp.rate[i] = incr / bp.grid.dt(i);
        bp.root[i] = std::sqrt(bp.rate[i]);
    }
    return bp;
}

} // namespace

BracketPath bracket_from_levels(const DiscreteRoughPath& rp) {
    std::vector<double> values(rp.y.size());
    for (std::size_t i = 0; i < rp.y.size(); ++i)
        values[i] = rp.y[i] * rp.y[i] - 2.0 * rp.yy0[i];
    return finish_bracket(rp.grid, std::move(values));
}

BracketPath bracket_from_rate(const std::vector<double>& rate_per_step, const TimeGrid& grid) {
    if (rate_per_step.size() != grid.n_steps())
        throw std::invalid_argument("bracket_from_rate: rate length must be grid steps");
    BracketPath bp;
    bp.grid = grid;
    bp.values.resize(grid.size());
    bp.rate = rate_per_step;
    bp.root.resize(rate_per_step.size());
    bp.values[0] = 0.0;
    for (std::size_t i = 0; i < rate_per_step.size(); ++i) {
        if (!(rate_per_step[i] >= 0.0))
            throw std::invalid_argument("bracket_from_rate: negative rate at step " +
                                        std::to_string(i));
        bp.values[i + 1] = bp.values[i] + rate_per_step[i] * grid.dt(i);
        bp.root[i] = std::sqrt(rate_per_step[i]);
    }
    return bp;
}

LiftedPath make_lifted(const TimeGrid& grid, std::vector<double> y, BracketPath br) {
    require_same_grid(grid, br.grid, "make_lifted");
    if (y.size() != grid.size())
        throw std::invalid_argument("make_lifted: level-1 length must match grid");
    LiftedPath lp;
    lp.rp.grid = grid;
    lp.rp.yy0 = levels_from_bracket(y, br.values);
    lp.rp.y = std::move(y);
    lp.br = std::move(br);
    return lp;
}

DiscreteRoughPath geometrify(const LiftedPath& lp) {
    require_same_grid(lp.rp.grid, lp.br.grid, "geometrify");
    DiscreteRoughPath g;
    g.grid = lp.rp.grid;
    g.y = lp.rp.y;
    g.yy0.resize(g.y.size());
    for (std::size_t i = 0; i < g.y.size(); ++i)
        g.yy0[i] = 0.5 * (g.y[i] * g.y[i]);
    return g;
}

DiscreteRoughPath degeometrify(const DiscreteRoughPath& geometric, const BracketPath& br) {
    require_same_grid(geometric.grid, br.grid, "degeometrify");
    DiscreteRoughPath rp;
    rp.grid = geometric.grid;
    rp.y = geometric.y;
    rp.yy0 = levels_from_bracket(rp.y, br.values);
    return rp;
}

LiftedPath coarsen(const LiftedPath& lp, const TimeGrid& coarse) {
    const TimeGrid& fine = lp.rp.grid;
    const double tol = 1e-12 * (std::abs(fine.back()) + 1.0);

    std::vector<std::size_t> idx(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k)
        idx[k] = fine.index_of(coarse[k], tol);  // throws if not a fine node

    std::vector<double> y_c(coarse.size());
    std::vector<double> br_values(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        y_c[k] = lp.rp.y[idx[k]];
        br_values[k] = lp.br.values[idx[k]];
    }
    // re-anchor so the coarse bracket starts at zero
    const double b0 = br_values[0];
    for (double& b : br_values) b -= b0;

    return make_lifted(coarse, std::move(y_c), finish_bracket(coarse, std::move(br_values)));
}

double chen_residual(double yy_st, double yy_su, double yy_ut, double y_su, double y_ut) {
    return std::abs(yy_st - yy_su - yy_ut - y_su * y_ut);
}

double chen_defect(const DiscreteRoughPath& rp, std::size_t s, std::size_t u, std::size_t t) {
    if (!(s <= u && u <= t) || t >= rp.grid.size())
        throw std::invalid_argument("chen_defect: need s <= u <= t within the grid");
    return chen_residual(rp.level2(s, t), rp.level2(s, u), rp.level2(u, t), rp.level1(s, u),
                         rp.level1(u, t));
}

std::pair<double, double> holder_estimate(const DiscreteRoughPath& rp, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("holder_estimate: alpha in (0,1) required");
    double n1 = 0.0, n2 = 0.0;
    const std::size_t n = rp.grid.size();
    for (std::size_t s = 0; s + 1 < n; ++s) {
        for (std::size_t t = s + 1; t < n; ++t) {
            const double h = rp.grid[t] - rp.grid[s];
            const double ha = std::pow(h, alpha);
            n1 = std::max(n1, std::abs(rp.level1(s, t)) / ha);
            n2 = std::max(n2, std::abs(rp.level2(s, t)) / (ha * ha));
        }
    }
    return {n1, n2};
}

} // namespace rvp
