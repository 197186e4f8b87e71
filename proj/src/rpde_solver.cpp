#include "rvp/rpde_solver.hpp"

#include "rvp/closed_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rvp {

SpaceGrid::SpaceGrid(double a_, double b_, std::size_t n_space_)
    : a(a_), b(b_), n_space(n_space_) {
    if (!(a < b)) throw std::invalid_argument("SpaceGrid: a < b required");
    if (n_space < 3) throw std::invalid_argument("SpaceGrid: at least 3 intervals");
}

double RPDEField::value0(double x) const {
    const std::size_t n = sgrid.n_space;
    if (x <= sgrid.a) return u[0];
    if (x >= sgrid.b) return u[n];
    const double pos = (x - sgrid.a) / sgrid.dx();
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 1);
    const double w = pos - static_cast<double>(i);
    return u[i] + w * (u[i + 1] - u[i]);
}

std::vector<double> tridiagonal_solve(const std::vector<double>& sub,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& super,
                                      const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || super.size() != n || rhs.size() != n)
        throw std::invalid_argument("tridiagonal_solve: length mismatch");
    std::vector<double> c(n), d(n);
    if (diag[0] == 0.0) throw std::runtime_error("tridiagonal_solve: zero pivot at row 0");
    c[0] = super[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double denom = diag[i] - sub[i] * c[i - 1];
        if (denom == 0.0)
            throw std::runtime_error("tridiagonal_solve: zero pivot at row " +
                                     std::to_string(i));
        c[i] = super[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    return d;
}

StepOperators assemble_step_operators(const LSVModel& model, double t_implicit,
                                      double t_explicit, const SpaceGrid& sgrid,
                                      double bracket_increment) {
    const std::size_t m = sgrid.size();
    const double dx = sgrid.dx();
    StepOperators ops;
    ops.sub.assign(m, 0.0);
    ops.diag.assign(m, 1.0);
    ops.super.assign(m, 0.0);
    ops.gamma_w.assign(m, 0.0);
    ops.gp_c1.assign(m, 0.0);
    ops.gp_c2.assign(m, 0.0);

    for (std::size_t n = 1; n + 1 < m; ++n) {
        const double x = sgrid.node(n);
        const auto ci = model.coeffs(t_implicit, x);
        const double lam = bracket_increment * 0.5 * ci.g * ci.g / (dx * dx);
        const double mu = bracket_increment * ci.f0 / dx;
        ops.sub[n] = -lam;
        ops.diag[n] = 1.0 + 2.0 * lam + mu;
        ops.super[n] = -(lam + mu);

        const auto ce = model.coeffs(t_explicit, x);
        ops.gamma_w[n] = ce.f / dx;
        ops.gp_c1[n] = -2.0 * ce.f0 / dx;
        ops.gp_c2[n] = ce.f * ce.f / (dx * dx);
    }
    return ops;
}

BoundaryValues resolve_boundary(BoundaryKind kind, const LSVModel& model, const Payoff& payoff,
                                const LiftedPath& driver, double a, double b) {
    const std::size_t jmax = driver.rp.grid.size();
    const double rho = model.rho();
    BoundaryValues bv;
    bv.lower.resize(jmax);
    bv.upper.resize(jmax);

    if (kind == BoundaryKind::ClosedForm && model.kind() == LSVModel::Kind::SABR &&
        model.beta() < 1.0)
        throw std::invalid_argument("resolve_boundary: no closed form for SABR beta < 1");

    for (std::size_t j = 0; j < jmax; ++j) {
        const double y_jT = driver.rp.y.back() - driver.rp.y[j];
        const double br_jT = driver.br.values.back() - driver.br.values[j];
        switch (kind) {
            case BoundaryKind::FrozenPayoff:
                bv.lower[j] = payoff(a);
                bv.upper[j] = payoff(b);
                break;
            case BoundaryKind::ConditionalMean:
                if (model.multiplicative()) {
                    const double shift = std::exp(rho * y_jT - 0.5 * rho * rho * br_jT);
                    bv.lower[j] = payoff(a * shift);
                    bv.upper[j] = payoff(b * shift);
                } else {
                    bv.lower[j] = payoff(a + rho * y_jT);
                    bv.upper[j] = payoff(b + rho * y_jT);
                }
                break;
            case BoundaryKind::ClosedForm:
                if (model.kind() == LSVModel::Kind::BachelierSV) {
                    bv.lower[j] = rt_bachelier(payoff, a, rho, y_jT, br_jT);
                    bv.upper[j] = rt_bachelier(payoff, b, rho, y_jT, br_jT);
                } else {
                    bv.lower[j] = rt_blackscholes(payoff, a, rho, y_jT, br_jT);
                    bv.upper[j] = rt_blackscholes(payoff, b, rho, y_jT, br_jT);
                }
                break;
        }
        if (!std::isfinite(bv.lower[j]) || !std::isfinite(bv.upper[j]))
            throw std::runtime_error("resolve_boundary: non-finite value at time node " +
                                     std::to_string(j));
    }
    return bv;
}

RPDEField solve_rpde(const LSVModel& model, const Payoff& payoff, const LiftedPath& driver,
                     const SpaceGrid& sgrid, SchemeOrder scheme, BoundaryKind boundary) {
    return solve_rpde(model, payoff, driver, sgrid, scheme,
                      resolve_boundary(boundary, model, payoff, driver, sgrid.a, sgrid.b));
}

RPDEField solve_rpde(const LSVModel& model, const Payoff& payoff, const LiftedPath& driver,
                     const SpaceGrid& sgrid, SchemeOrder scheme,
                     const BoundaryValues& boundary) {
    const TimeGrid& tgrid = driver.rp.grid;
    const std::size_t jmax = tgrid.n_steps();
    const std::size_t m = sgrid.size();
    if (boundary.lower.size() != jmax + 1 || boundary.upper.size() != jmax + 1)
        throw std::invalid_argument("solve_rpde: boundary data length mismatch");

    RPDEField field;
    field.tgrid = tgrid;
    field.sgrid = sgrid;
    field.scheme = scheme;
    field.u.assign((jmax + 1) * m, 0.0);

    // terminal condition, exact at every node
    for (std::size_t n = 0; n < m; ++n) field.u[jmax * m + n] = payoff(sgrid.node(n));

    std::vector<double> rhs(m);
    for (std::size_t j = jmax; j-- > 0;) {
        const double d_br = driver.br.increment(j);
        if (!(d_br >= 0.0))
            throw std::runtime_error("solve_rpde: negative bracket increment at step " +
                                     std::to_string(j));
        const double d_y = driver.rp.y[j + 1] - driver.rp.y[j];

        const StepOperators ops =
            assemble_step_operators(model, tgrid[j], tgrid[j + 1], sgrid, d_br);
        const double* next = field.row(j + 1);

        rhs[0] = boundary.lower[j];
        rhs[m - 1] = boundary.upper[j];
        for (std::size_t n = 1; n + 1 < m; ++n) {
            double v = next[n] + d_y * ops.gamma_w[n] * (next[n + 1] - next[n]);
            if (scheme == SchemeOrder::Order2) {
                const double half_dy2 = 0.5 * d_y * d_y;
                v += half_dy2 * (ops.gp_c1[n] * (next[n + 1] - next[n]) +
                                 ops.gp_c2[n] * (next[n + 1] + next[n - 1] - 2.0 * next[n]));
            }
            rhs[n] = v;
        }

        std::vector<double> sol = tridiagonal_solve(ops.sub, ops.diag, ops.super, rhs);
        double* cur = field.u.data() + j * m;
        for (std::size_t n = 0; n < m; ++n) {
            if (!std::isfinite(sol[n]))
                throw std::runtime_error("solve_rpde: non-finite value in sweep at step " +
                                         std::to_string(j));
            cur[n] = sol[n];
        }

        for (std::size_t n = 1; n + 1 < m; ++n) {
            const double viol =
                std::abs(ops.sub[n]) + std::abs(ops.super[n]) - std::abs(ops.diag[n]);
            if (viol > field.max_dominance_violation) field.max_dominance_violation = viol;
        }
    }
    return field;
}

} // namespace rvp
