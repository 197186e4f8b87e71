#pragma once

#include <cstddef>
#include <vector>

namespace rvp {

/// Strictly increasing sequence of time points (in years).
class TimeGrid {
  public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> times);

    /// Uniform grid with n_steps steps on [0, horizon].
    static TimeGrid uniform(double horizon, std::size_t n_steps);

    std::size_t size() const { return times_.size(); }
    std::size_t n_steps() const { return times_.size() - 1; }
    double operator[](std::size_t i) const { return times_[i]; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }
    double dt(std::size_t i) const { return times_[i + 1] - times_[i]; }
    const std::vector<double>& times() const { return times_; }

    bool is_uniform(double rel_tol = 1e-9) const;

    /// Index of node matching t, or throws if no node is within tol.
    std::size_t index_of(double t, double tol) const;

    bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

  private:
    std::vector<double> times_;
};

} // namespace rvp
