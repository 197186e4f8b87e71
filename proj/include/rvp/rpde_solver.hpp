#pragma once

#include "rvp/lsv_models.hpp"
#include "rvp/rough_core.hpp"

#include <cstddef>
#include <vector>

namespace rvp {

/// Uniform space grid on [a, b] with n_space intervals (n_space + 1 nodes).
struct SpaceGrid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n_space = 3;

    SpaceGrid() = default;
    SpaceGrid(double a_, double b_, std::size_t n_space_);

    double dx() const { return (b - a) / static_cast<double>(n_space); }
    std::size_t size() const { return n_space + 1; }
    double node(std::size_t i) const {
        return a + (b - a) * static_cast<double>(i) / static_cast<double>(n_space);
    }
};

enum class SchemeOrder { Order1, Order2 };

enum class BoundaryKind { ClosedForm, ConditionalMean, FrozenPayoff };

/// Dirichlet data resolved to per-time-node sequences.
struct BoundaryValues {
    std::vector<double> lower;  // psi_a(t_j)
    std::vector<double> upper;  // psi_b(t_j)
};

/// Space-time solution of the backward sweep. Row j holds u(t_j, .).
struct RPDEField {
    TimeGrid tgrid;
    SpaceGrid sgrid;
    SchemeOrder scheme = SchemeOrder::Order1;
    std::vector<double> u;  // (J+1) x (N+1), row-major
    double max_dominance_violation = 0.0;  // diagnostic, not asserted

    double at(std::size_t j, std::size_t n) const { return u[j * sgrid.size() + n]; }
    const double* row(std::size_t j) const { return u.data() + j * sgrid.size(); }

    /// Linear interpolation of the t = 0 row.
    double value0(double x) const;
};

/// Thomas elimination for a tridiagonal system; sub[0] and super[n-1] are
/// ignored. Throws on a vanishing pivot.
std::vector<double> tridiagonal_solve(const std::vector<double>& sub,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& super,
                                      const std::vector<double>& rhs);

/// Coefficients of one backward step: the implicit matrix Id - d[Y] L_j
/// (rows 0 and N pinned to identity) and the explicit row weights of the
/// transport term.
struct StepOperators {
    std::vector<double> sub, diag, super;  // implicit tridiagonal
    std::vector<double> gamma_w;           // f(t,x_n) / dx, forward difference weight
    std::vector<double> gp_c1;             // -2 f0 / dx   (order 2)
    std::vector<double> gp_c2;             // f^2 / dx^2   (order 2)
};

StepOperators assemble_step_operators(const LSVModel& model, double t_implicit,
                                      double t_explicit, const SpaceGrid& sgrid,
                                      double bracket_increment);

/// Dirichlet data for the requested boundary kind. ClosedForm needs a model
/// with a conditional closed form (Bachelier or Black-Scholes family).
BoundaryValues resolve_boundary(BoundaryKind kind, const LSVModel& model, const Payoff& payoff,
                                const LiftedPath& driver, double a, double b);

/// Backward implicit-explicit finite-difference solve of the pathwise
/// pricing equation along the driver, first or second order in the rough
/// increment.
RPDEField solve_rpde(const LSVModel& model, const Payoff& payoff, const LiftedPath& driver,
                     const SpaceGrid& sgrid, SchemeOrder scheme, BoundaryKind boundary);

RPDEField solve_rpde(const LSVModel& model, const Payoff& payoff, const LiftedPath& driver,
                     const SpaceGrid& sgrid, SchemeOrder scheme,
                     const BoundaryValues& boundary);

} // namespace rvp
