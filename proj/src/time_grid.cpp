#include "rvp/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvp {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 nodes");
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        const double step = times_[i + 1] - times_[i];
        if (!(step > 0.0) || !std::isfinite(step))
            throw std::invalid_argument("TimeGrid: times must be strictly increasing and finite");
    }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_steps) {
    if (!(horizon > 0.0) || n_steps < 1)
        throw std::invalid_argument("TimeGrid::uniform: horizon > 0 and n_steps >= 1 required");
    std::vector<double> t(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i)
        t[i] = horizon * static_cast<double>(i) / static_cast<double>(n_steps);
    return TimeGrid(std::move(t));
}

bool TimeGrid::is_uniform(double rel_tol) const {
    const double h0 = dt(0);
    for (std::size_t i = 1; i + 1 < times_.size(); ++i)
        if (std::abs(dt(i) - h0) > rel_tol * h0) return false;
    return true;
}

std::size_t TimeGrid::index_of(double t, double tol) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    if (it != times_.end() && std::abs(*it - t) <= tol)
        return static_cast<std::size_t>(it - times_.begin());
    throw std::invalid_argument("TimeGrid::index_of: node not on grid");
}

} // namespace rvp
