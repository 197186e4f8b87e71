#include "rvp/vol_models.hpp"

#include "rvp/rng.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace rvp {

VolModelSpec VolModelSpec::constant(double vbar) {
    if (!(vbar >= 0.0)) throw std::invalid_argument("VolModelSpec: vbar >= 0");
    VolModelSpec s;
    s.kind = Kind::Constant;
    s.vbar = vbar;
    return s;
}

VolModelSpec VolModelSpec::rough_bergomi(double xi0, double eta, double hurst) {
    if (!(xi0 > 0.0)) throw std::invalid_argument("VolModelSpec: xi0 > 0");
    if (!(eta >= 0.0)) throw std::invalid_argument("VolModelSpec: eta >= 0");
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("VolModelSpec: H in (0,1)");
    VolModelSpec s;
    s.kind = Kind::RoughBergomi;
    s.xi0 = xi0;
    s.eta = eta;
    s.hurst = hurst;
    return s;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [0,1]
constexpr int kGL = 16;
const double kGLx[kGL] = {
    0.0052995325041750337019, 0.0277124884633836999632, 0.0671843988060841224019,
    0.1222977958224984867952, 0.1910618777986781147149, 0.2709916111713863151316,
    0.3591982246103705422868, 0.4524937450811812866824, 0.5475062549188187133176,
    0.6408017753896294577132, 0.7290083888286136848684, 0.8089381222013218852851,
    0.8777022041775015132048, 0.9328156011939158775981, 0.9722875115366163000368,
    0.9947004674958249662981};
const double kGLw[kGL] = {
    0.0135762297058770482066, 0.0311267619693239468159, 0.0475792558412463928441,
    0.0623144856277669384470, 0.0747979944082883679845, 0.0845782596975012679330,
    0.0913017075224617918882, 0.0947253052275342510846, 0.0947253052275342510846,
    0.0913017075224617918882, 0.0845782596975012679330, 0.0747979944082883679845,
    0.0623144856277669384470, 0.0475792558412463928441, 0.0311267619693239468159,
    0.0135762297058770482066};

// integral over one unit cell [c-1, c] of (k+w)^a w^a, a = H - 1/2, in step units
double kernel_cell(double k, int c, double a) {
    if (c == 1) {
        // remove the w^a endpoint singularity with w = v^{1/(a+1)}
        const double p = 1.0 / (a + 1.0);
        double acc = 0.0;
        // graded subdivision toward v = 0 where curvature concentrates
        double lo = 0.0;
        for (double hi : {0.01, 0.1, 0.4, 1.0}) {
            for (int q = 0; q < kGL; ++q) {
                const double v = lo + (hi - lo) * kGLx[q];
                acc += (hi - lo) * kGLw[q] * std::pow(k + std::pow(v, p), a);
            }
            lo = hi;
        }
        return acc / (a + 1.0);
    }
    double acc = 0.0;
    for (int q = 0; q < kGL; ++q) {
        const double w = (c - 1) + kGLx[q];
        acc += kGLw[q] * std::pow(k + w, a) * std::pow(w, a);
    }
    return acc;
}

} // namespace

std::vector<double> volterra_covariance(const TimeGrid& grid, double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("volterra_covariance: H in (0,1)");
    if (!grid.is_uniform())
        throw std::invalid_argument("volterra_covariance: uniform grid required");
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt(0);
    const double a = hurst - 0.5;
    const std::size_t dim = 2 * n;
    std::vector<double> cov(dim * dim, 0.0);

    // X block: Cov(X_{t_i}, X_{t_j}) = dt^{2H} F(|i-j|, min(i,j)) in step units
    const double scale_xx = std::pow(dt, 2.0 * hurst);
    for (std::size_t k = 0; k < n; ++k) {
        double run = 0.0;
        for (std::size_t i = 1; i + k <= n; ++i) {
            if (k == 0) {
                run = std::pow(static_cast<double>(i), 2.0 * hurst) / (2.0 * hurst);
            } else {
                run += kernel_cell(static_cast<double>(k), static_cast<int>(i), a);
            }
            const std::size_t row = (i + k) - 1, col = i - 1;
            cov[row * dim + col] = cov[col * dim + row] = scale_xx * run;
        }
    }

    // cross block: Cov(X_{t_i}, dW_j) for j <= i, closed form of the kernel integral
    const double scale_xw = std::pow(dt, hurst + 0.5) / (hurst + 0.5);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= i; ++j) {
            const double d = static_cast<double>(i - j);
            const double val = scale_xw * (std::pow(d + 1.0, hurst + 0.5) -
                                           std::pow(d, hurst + 0.5));
            cov[(i - 1) * dim + (n + j - 1)] = val;
            cov[(n + j - 1) * dim + (i - 1)] = val;
        }
    }

    for (std::size_t j = 0; j < n; ++j) cov[(n + j) * dim + (n + j)] = dt;
    return cov;
}

void cholesky_factor(std::vector<double>& matrix, std::size_t n, int max_jitter) {
    if (matrix.size() != n * n) throw std::invalid_argument("cholesky_factor: size mismatch");
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += matrix[i * n + i];
    const double jitter = 1e-12 * trace / static_cast<double>(n);

    std::vector<double> saved = matrix;
    for (int attempt = 0; attempt <= max_jitter; ++attempt) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            double* row_i = matrix.data() + i * n;
            for (std::size_t j = 0; j <= i; ++j) {
                const double* row_j = matrix.data() + j * n;
                double s = row_i[j];
                for (std::size_t k = 0; k < j; ++k) s -= row_i[k] * row_j[k];
                if (i == j) {
                    if (!(s > 0.0)) {
                        ok = false;
                        break;
                    }
                    row_i[j] = std::sqrt(s);
                } else {
                    row_i[j] = s / row_j[j];
                }
            }
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) matrix[i * n + j] = 0.0;
            return;
        }
        matrix = saved;
        for (std::size_t i = 0; i < n; ++i)
            matrix[i * n + i] += jitter * std::pow(10.0, attempt);
        saved = matrix;
    }
    throw std::runtime_error("cholesky_factor: matrix not positive definite after jitter");
}

namespace {

struct VolterraFactor {
    std::size_t n = 0;
    std::vector<double> chol;  // 2n x 2n lower triangular
};

using FactorKey = std::tuple<std::size_t, double, double>;  // (steps, horizon, H)

const VolterraFactor& cached_factor(const TimeGrid& grid, double hurst) {
    static std::map<FactorKey, std::unique_ptr<VolterraFactor>> cache;
    static std::mutex mtx;
    const FactorKey key{grid.n_steps(), grid.back(), hurst};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto f = std::make_unique<VolterraFactor>();
        f->n = grid.n_steps();
        f->chol = volterra_covariance(grid, hurst);
        cholesky_factor(f->chol, 2 * f->n);
        it = cache.emplace(key, std::move(f)).first;
    }
    return *it->second;
}

} // namespace

VolSample simulate_backbone(const VolModelSpec& spec, const TimeGrid& grid, std::uint64_t seed) {
    const std::size_t n = grid.n_steps();
    VolSample out;
    out.grid = grid;
    out.v.resize(n + 1);
    out.V.resize(n + 1);
    out.dW.resize(n);
    out.I.resize(n + 1);

    GaussianStream z(seed);

    if (spec.kind == VolModelSpec::Kind::Constant) {
        for (std::size_t i = 0; i <= n; ++i) out.v[i] = spec.vbar;
        for (std::size_t i = 0; i < n; ++i) out.dW[i] = std::sqrt(grid.dt(i)) * z();
    } else {
        if (!grid.is_uniform())
            throw std::invalid_argument("simulate_backbone: uniform grid required");
        if (n > kVolterraMaxSteps)
            throw std::invalid_argument(
                "simulate_backbone: exact covariance limited to 2000 steps");
        const VolterraFactor& fac = cached_factor(grid, spec.hurst);
        const std::size_t dim = 2 * n;
        std::vector<double> gauss(dim), path(dim);
        for (auto& g : gauss) g = z();
        for (std::size_t i = 0; i < dim; ++i) {
            const double* row = fac.chol.data() + i * dim;
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += row[k] * gauss[k];
            path[i] = s;
        }
        const double two_h = 2.0 * spec.hurst;
        out.v[0] = spec.xi0;
        for (std::size_t i = 1; i <= n; ++i) {
            const double t = grid[i];
            const double var_x = std::pow(t, two_h) / two_h;
            out.v[i] = spec.xi0 *
                       std::exp(spec.eta * path[i - 1] - 0.5 * spec.eta * spec.eta * var_x);
        }
        for (std::size_t i = 0; i < n; ++i) out.dW[i] = path[n + i];
    }

    if (spec.v_cap) {
        for (auto& vi : out.v)
            if (vi > *spec.v_cap) {
                vi = *spec.v_cap;
                ++out.truncated;
            }
    }
    for (std::size_t i = 0; i <= n; ++i) {
        out.v_max = std::max(out.v_max, out.v[i]);
        out.V[i] = out.v[i] * out.v[i];
    }
    out.I[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) out.I[i + 1] = out.I[i] + out.v[i] * out.dW[i];
    return out;
}

LiftedPath integrate_vol(const VolSample& sample) {
    std::vector<double> rate(sample.grid.n_steps());
    for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = sample.V[i];
    return make_lifted(sample.grid, sample.I, bracket_from_rate(rate, sample.grid));
}

} // namespace rvp
