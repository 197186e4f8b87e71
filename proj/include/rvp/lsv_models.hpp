#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rvp {

/// Local-volatility pair (f, g) of the price dynamics
/// dX = f(t,X) dI + g(t,X) v dB, split by the correlation rho.
class LSVModel {
  public:
    enum class Kind { BachelierSV, BlackScholesSV, SABR };

    static LSVModel bachelier(double rho);
    static LSVModel black_scholes(double rho);
    static LSVModel sabr(double rho, double beta);

    Kind kind() const { return kind_; }
    double rho() const { return rho_; }
    double beta() const { return beta_; }

    /// True for models whose natural state space is multiplicative (x > 0).
    bool multiplicative() const { return kind_ != Kind::BachelierSV; }

    struct Coeffs {
        double f;
        double g;
        double dxf;
        double f0;  // -1/2 f dxf
    };

    /// Coefficients at (t, x). SABR evaluations at x below the floor are
    /// clamped and flagged through `clamped`.
    Coeffs coeffs(double t, double x) const;

    /// (c1, c2) with Gamma'[u] = c1 du/dx + c2 d2u/dx2, c1 = -2 f0, c2 = f^2.
    std::pair<double, double> gamma_prime_coeffs(double t, double x) const;

    /// Evaluation floor for SABR power laws, relative to a price scale.
    void set_x_floor(double x_floor) { x_floor_ = x_floor; }
    double x_floor() const { return x_floor_; }
    bool clamped() const { return clamp_count() > 0; }
    std::size_t clamp_count() const { return clamped_count_.load(std::memory_order_relaxed); }

    std::string name() const;

    LSVModel(const LSVModel& other)
        : kind_(other.kind_), rho_(other.rho_), beta_(other.beta_), x_floor_(other.x_floor_),
          clamped_count_(other.clamp_count()) {}
    LSVModel& operator=(const LSVModel& other) {
        kind_ = other.kind_;
        rho_ = other.rho_;
        beta_ = other.beta_;
        x_floor_ = other.x_floor_;
        clamped_count_.store(other.clamp_count(), std::memory_order_relaxed);
        return *this;
    }

  private:
    LSVModel(Kind kind, double rho, double beta);

    Kind kind_;
    double rho_;
    double beta_;
    double x_floor_ = 1e-8;
    mutable std::atomic<std::size_t> clamped_count_{0};
};

/// Bounded continuous European payoff. Puts and calls can be blended to a
/// constant over [-w, 0] so the function stays C^1 and bounded for
/// negative prices.
class Payoff {
  public:
    enum class Kind { Put, Call, Sampled };

    static Payoff put(double strike, double smoothing = 0.0);
    static Payoff call(double strike, double smoothing = 0.0);
    static Payoff sampled(std::vector<double> x, std::vector<double> values);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    double strike() const { return strike_; }
    double smoothing() const { return smoothing_; }

  private:
    Payoff() = default;
    Kind kind_ = Kind::Put;
    double strike_ = 0.0;
    double smoothing_ = 0.0;
    std::vector<double> xs_, vals_;
};

} // namespace rvp
