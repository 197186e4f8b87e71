#include "rvp/lsv_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvp {

LSVModel::LSVModel(Kind kind, double rho, double beta) : kind_(kind), rho_(rho), beta_(beta) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("LSVModel: rho in [-1,1]");
    if (kind == Kind::SABR && !(beta > 0.5 && beta <= 1.0))
        throw std::invalid_argument("LSVModel: SABR beta in (1/2, 1]");
}

LSVModel LSVModel::bachelier(double rho) { return LSVModel(Kind::BachelierSV, rho, 0.0); }
LSVModel LSVModel::black_scholes(double rho) { return LSVModel(Kind::BlackScholesSV, rho, 1.0); }
LSVModel LSVModel::sabr(double rho, double beta) { return LSVModel(Kind::SABR, rho, beta); }

LSVModel::Coeffs LSVModel::coeffs(double /*t*/, double x) const {
    const double rbar = std::sqrt(1.0 - rho_ * rho_);
    switch (kind_) {
        case Kind::BachelierSV:
            return {rho_, rbar, 0.0, 0.0};
        case Kind::BlackScholesSV:
            return {rho_ * x, rbar * x, rho_, -0.5 * rho_ * rho_ * x};
        case Kind::SABR: {
            if (x < x_floor_) {
                x = x_floor_;
                clamped_count_.fetch_add(1, std::memory_order_relaxed);
            }
            const double xb = std::pow(x, beta_);
            const double f = rho_ * xb;
            const double dxf = rho_ * beta_ * xb / x;
            return {f, rbar * xb, dxf, -0.5 * f * dxf};
        }
    }
    throw std::logic_error("LSVModel: unknown kind");
}

std::pair<double, double> LSVModel::gamma_prime_coeffs(double t, double x) const {
    const Coeffs c = coeffs(t, x);
    return {-2.0 * c.f0, c.f * c.f};
}

std::string LSVModel::name() const {
    switch (kind_) {
        case Kind::BachelierSV: return "bachelier";
        case Kind::BlackScholesSV: return "blackscholes";
        case Kind::SABR: return "sabr";
    }
    return "?";
}

Payoff Payoff::put(double strike, double smoothing) {
    if (smoothing < 0.0) throw std::invalid_argument("Payoff: smoothing width >= 0");
    Payoff p;
    p.kind_ = Kind::Put;
    p.strike_ = strike;
    p.smoothing_ = smoothing;
    return p;
}

Payoff Payoff::call(double strike, double smoothing) {
    if (smoothing < 0.0) throw std::invalid_argument("Payoff: smoothing width >= 0");
    Payoff p;
    p.kind_ = Kind::Call;
    p.strike_ = strike;
    p.smoothing_ = smoothing;
    return p;
}

Payoff Payoff::sampled(std::vector<double> x, std::vector<double> values) {
    if (x.size() != values.size() || x.size() < 2)
        throw std::invalid_argument("Payoff::sampled: need matching grids, length >= 2");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) throw std::invalid_argument("Payoff::sampled: x not increasing");
    Payoff p;
    p.kind_ = Kind::Sampled;
    p.xs_ = std::move(x);
    p.vals_ = std::move(values);
    return p;
}

double Payoff::operator()(double x) const {
    switch (kind_) {
        case Kind::Put: {
            if (x >= 0.0 || smoothing_ == 0.0) return std::max(strike_ - x, 0.0);
            // Hermite blend on [-w, 0]: matches the put at 0 (value K, slope -1)
            // and flattens to the constant K at -w; overshoot <= 4w/27.
            if (x <= -smoothing_) return strike_;
            const double s = (x + smoothing_) / smoothing_;
            return strike_ + smoothing_ * s * s * (1.0 - s);
        }
        case Kind::Call:
            // calls are unbounded above; admitted but used only in diagnostics
            return std::max(x - strike_, 0.0);
        case Kind::Sampled: {
            if (x <= xs_.front()) {
                const double m = (vals_[1] - vals_[0]) / (xs_[1] - xs_[0]);
                return vals_[0] + m * (x - xs_[0]);
            }
            if (x >= xs_.back()) {
                const std::size_t n = xs_.size();
                const double m = (vals_[n - 1] - vals_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
                return vals_[n - 1] + m * (x - xs_[n - 1]);
            }
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
            const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
            return vals_[i] + w * (vals_[i + 1] - vals_[i]);
        }
    }
    throw std::logic_error("Payoff: unknown kind");
}

} // namespace rvp
