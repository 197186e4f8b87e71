#include "rvp/mc_engine.hpp"

#include "rvp/closed_form.hpp"
#include "rvp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace rvp {

namespace {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
                next.store(n);  // stop the pool, a failed sample aborts the run
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void finalize_report(PriceReport& r) {
    const std::size_t nx = r.x.size(), m = r.m_samples;
    r.mean.assign(nx, 0.0);
    r.se.assign(nx, 0.0);
    for (std::size_t k = 0; k < nx; ++k) {
        double mu = 0.0;
        for (std::size_t i = 0; i < m; ++i) mu += r.values[i * nx + k];
        mu /= static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = r.values[i * nx + k] - mu;
            ss += d * d;
        }
        r.mean[k] = mu;
        r.se[k] = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m))
                        : 0.0;
    }
}

double backbone_scale(const VolModelSpec& vol) {
    return vol.kind == VolModelSpec::Kind::Constant ? vol.vbar : vol.xi0;
}

std::vector<double> std_curve(const std::vector<double>& values, std::size_t m,
                              std::size_t nx) {
    std::vector<double> out(nx, 0.0);
    for (std::size_t k = 0; k < nx; ++k) {
        double mu = 0.0;
        for (std::size_t i = 0; i < m; ++i) mu += values[i * nx + k];
        mu /= static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = values[i * nx + k] - mu;
            ss += d * d;
        }
        out[k] = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;
    }
    return out;
}

double max_ratio(const std::vector<double>& num, const std::vector<double>& den,
                 bool& infinite) {
    double best = 0.0;
    infinite = false;
    for (std::size_t k = 0; k < num.size(); ++k) {
        if (den[k] == 0.0) {
            if (num[k] > 0.0) infinite = true;
            continue;
        }
        best = std::max(best, num[k] / den[k]);
    }
    return best;
}

} // namespace

SpaceGrid default_domain(const LSVModel& model, const VolModelSpec& vol, const RunConfig& cfg) {
    if (cfg.domain) return SpaceGrid(cfg.domain->first, cfg.domain->second, cfg.n_space);
    if (model.multiplicative()) {
        const double lo = std::max(1e-8 * cfg.x0, cfg.x0 / 4.0);
        return SpaceGrid(lo, 2.5 * cfg.x0, cfg.n_space);
    }
    const double half = 6.0 * backbone_scale(vol) * std::sqrt(cfg.maturity);
    return SpaceGrid(cfg.x0 - half, cfg.x0 + half, cfg.n_space);
}

BoundaryKind default_boundary(const LSVModel& model) {
    return model.kind() == LSVModel::Kind::SABR && model.beta() < 1.0
               ? BoundaryKind::ConditionalMean
               : BoundaryKind::ClosedForm;
}

TimeGrid pde_time_grid(const TimeGrid& fine, std::size_t j_steps) {
    const std::size_t n = fine.n_steps();
    if (j_steps > n) throw std::invalid_argument("pde_time_grid: j_steps exceeds fine steps");
    std::vector<double> nodes(j_steps + 1);
    for (std::size_t k = 0; k <= j_steps; ++k) nodes[k] = fine[(k * n) / j_steps];
    return TimeGrid(std::move(nodes));
}

PriceReport full_mc_price(const LSVModel& model, const Payoff& payoff, const VolModelSpec& vol,
                          const RunConfig& cfg, const std::vector<double>& xs) {
    const TimeGrid fine = TimeGrid::uniform(cfg.maturity, cfg.n_fine);
    PriceReport report;
    report.x = xs;
    report.m_samples = cfg.m_samples;
    report.values.assign(cfg.m_samples * xs.size(), 0.0);

    parallel_for(cfg.m_samples, cfg.workers, [&](std::size_t m) {
        const auto sample =
            simulate_backbone(vol, fine, derive_seed(cfg.seed, kStreamBackbone, m));
        GaussianStream bs(derive_seed(cfg.seed, kStreamPriceB, m));
        std::vector<double> db(cfg.n_fine);
        for (std::size_t i = 0; i < cfg.n_fine; ++i)
            db[i] = std::sqrt(fine.dt(i)) * bs();

        for (std::size_t k = 0; k < xs.size(); ++k) {
            double x = xs[k];
            for (std::size_t i = 0; i < cfg.n_fine; ++i) {
                // sub-zero excursions of power-law models freeze through the
                // coefficient floor, mirroring the solver's domain guard
                const auto c = model.coeffs(fine[i], x);
                x += c.f * sample.v[i] * sample.dW[i] + c.g * sample.v[i] * db[i];
            }
            if (!std::isfinite(x))
                throw std::runtime_error("full_mc_price: path explosion in sample " +
                                         std::to_string(m));
            report.values[m * xs.size() + k] = payoff(x);
        }
    });
    finalize_report(report);
    return report;
}

SamplePipeline run_sample_pipeline(const LSVModel& model, const Payoff& payoff,
                                   const VolModelSpec& vol, const RunConfig& cfg,
                                   std::size_t sample_index) {
    const TimeGrid fine = TimeGrid::uniform(cfg.maturity, cfg.n_fine);
    SamplePipeline p;
    p.backbone =
        simulate_backbone(vol, fine, derive_seed(cfg.seed, kStreamBackbone, sample_index));
    p.fine_lift = integrate_vol(p.backbone);
    p.driver = coarsen(p.fine_lift, pde_time_grid(fine, cfg.j_steps));
    const SpaceGrid sg = default_domain(model, vol, cfg);
    const BoundaryKind bk = cfg.boundary.value_or(default_boundary(model));
    p.field = solve_rpde(model, payoff, p.driver, sg, cfg.scheme, bk);
    return p;
}

PriceReport partial_mc_price(const LSVModel& model, const Payoff& payoff,
                             const VolModelSpec& vol, const RunConfig& cfg,
                             const std::vector<double>& xs) {
    PriceReport report;
    report.x = xs;
    report.m_samples = cfg.m_samples;
    report.values.assign(cfg.m_samples * xs.size(), 0.0);

    parallel_for(cfg.m_samples, cfg.workers, [&](std::size_t m) {
        LSVModel local = model;  // per-task copy, clamp counter is not shared
        const auto pipe = run_sample_pipeline(local, payoff, vol, cfg, m);
        for (std::size_t k = 0; k < xs.size(); ++k)
            report.values[m * xs.size() + k] = pipe.field.value0(xs[k]);
    });
    finalize_report(report);
    return report;
}

McValue conditional_sde_price(const LSVModel& model, const Payoff& payoff,
                              const LiftedPath& frozen, double x0, std::size_t inner_m,
                              std::uint64_t seed) {
    if (inner_m < 100)
        throw std::invalid_argument("conditional_sde_price: inner_m >= 100 required");
    const TimeGrid& grid = frozen.rp.grid;
    const std::size_t n = grid.n_steps();

    std::vector<double> dy(n), drift_dt(n), diff_sqdt(n);
    for (std::size_t i = 0; i < n; ++i) {
        dy[i] = frozen.rp.y[i + 1] - frozen.rp.y[i];
        drift_dt[i] = frozen.br.rate[i] * grid.dt(i);
        diff_sqdt[i] = frozen.br.root[i] * std::sqrt(grid.dt(i));
    }

    GaussianStream g(seed);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < inner_m; ++k) {
        double x = x0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = model.coeffs(grid[i], x);
            x += c.f0 * drift_dt[i] + c.f * dy[i] + c.g * diff_sqdt[i] * g();
        }
        if (!std::isfinite(x))
            throw std::runtime_error("conditional_sde_price: non-finite path");
        const double p = payoff(x);
        const double d = p - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (p - mean);
    }
    McValue out;
    out.mean = mean;
    out.n = inner_m;
    out.se = inner_m > 1 ? std::sqrt(m2 / static_cast<double>(inner_m - 1) /
                                     static_cast<double>(inner_m))
                         : 0.0;
    return out;
}

GreeksReport greeks_fd(const PriceReport& report, double h) {
    const std::size_t nx = report.x.size();
    if (!(h > 0.0)) throw std::invalid_argument("greeks_fd: h > 0");
    if (nx < 3) throw std::invalid_argument("greeks_fd: need at least 3 grid points");
    for (std::size_t k = 0; k + 1 < nx; ++k)
        if (std::abs(report.x[k + 1] - report.x[k] - h) > 1e-9 * h)
            throw std::invalid_argument("greeks_fd: report grid spacing must equal h");

    GreeksReport gr;
    gr.h = h;
    gr.m_samples = report.m_samples;
    const std::size_t nd = nx - 1, ng = nx - 2;
    gr.x_delta.assign(report.x.begin(), report.x.end() - 1);
    gr.x_gamma.assign(report.x.begin() + 1, report.x.end() - 1);
    gr.delta_samples.assign(report.m_samples * nd, 0.0);
    gr.gamma_samples.assign(report.m_samples * ng, 0.0);

    for (std::size_t m = 0; m < report.m_samples; ++m) {
        const double* row = report.values.data() + m * nx;
        for (std::size_t k = 0; k < nd; ++k)
            gr.delta_samples[m * nd + k] = (row[k + 1] - row[k]) / h;
        for (std::size_t k = 0; k < ng; ++k)
            gr.gamma_samples[m * ng + k] =
                (row[k + 2] - 2.0 * row[k + 1] + row[k]) / (h * h);
    }

    gr.delta.assign(nd, 0.0);
    gr.gamma.assign(ng, 0.0);
    for (std::size_t k = 0; k < nd; ++k) {
        double mu = 0.0;
        for (std::size_t m = 0; m < report.m_samples; ++m)
            mu += gr.delta_samples[m * nd + k];
        gr.delta[k] = mu / static_cast<double>(report.m_samples);
    }
    for (std::size_t k = 0; k < ng; ++k) {
        double mu = 0.0;
        for (std::size_t m = 0; m < report.m_samples; ++m)
            mu += gr.gamma_samples[m * ng + k];
        gr.gamma[k] = mu / static_cast<double>(report.m_samples);
    }
    gr.sigma_delta = std_curve(gr.delta_samples, report.m_samples, nd);
    gr.sigma_gamma = std_curve(gr.gamma_samples, report.m_samples, ng);
    return gr;
}

VarianceReport variance_ratios(const PriceReport& full, const PriceReport& partial, double h) {
    if (full.x != partial.x || full.m_samples != partial.m_samples)
        throw std::invalid_argument("variance_ratios: reports must share x-grid and M");
    VarianceReport vr;
    vr.x_price = full.x;
    vr.sigma_price_mc = std_curve(full.values, full.m_samples, full.x.size());
    vr.sigma_price_rpde = std_curve(partial.values, partial.m_samples, partial.x.size());

    const auto gf = greeks_fd(full, h);
    const auto gp = greeks_fd(partial, h);
    vr.x_delta = gf.x_delta;
    vr.x_gamma = gf.x_gamma;
    vr.sigma_delta_mc = gf.sigma_delta;
    vr.sigma_delta_rpde = gp.sigma_delta;
    vr.sigma_gamma_mc = gf.sigma_gamma;
    vr.sigma_gamma_rpde = gp.sigma_gamma;

    vr.price_ratio = max_ratio(vr.sigma_price_mc, vr.sigma_price_rpde, vr.price_ratio_infinite);
    vr.delta_ratio = max_ratio(vr.sigma_delta_mc, vr.sigma_delta_rpde, vr.delta_ratio_infinite);
    vr.gamma_ratio = max_ratio(vr.sigma_gamma_mc, vr.sigma_gamma_rpde, vr.gamma_ratio_infinite);
    return vr;
}

double strong_relative_error(const std::vector<std::vector<double>>& fd_rows,
                             const std::vector<std::vector<double>>& ref_rows) {
    if (fd_rows.size() != ref_rows.size() || fd_rows.empty())
        throw std::invalid_argument("strong_relative_error: row count mismatch");
    double acc = 0.0;
    for (std::size_t m = 0; m < fd_rows.size(); ++m) {
        if (fd_rows[m].size() != ref_rows[m].size())
            throw std::invalid_argument("strong_relative_error: grid mismatch");
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < fd_rows[m].size(); ++k) {
            const double d = ref_rows[m][k] - fd_rows[m][k];
            num += d * d;
            den += ref_rows[m][k] * ref_rows[m][k];
        }
        if (den == 0.0)
            throw std::invalid_argument("strong_relative_error: zero-norm reference");
        acc += std::sqrt(num / den);
    }
    return acc / static_cast<double>(fd_rows.size());
}

ConvergenceResult convergence_study(const LSVModel& model, const Payoff& payoff,
                                    const VolModelSpec& vol, const RunConfig& cfg,
                                    const std::vector<std::size_t>& n_space_list) {
    const TimeGrid fine = TimeGrid::uniform(cfg.maturity, cfg.n_fine);
    const TimeGrid pgrid = pde_time_grid(fine, cfg.j_steps);
    const bool has_closed_form = model.kind() != LSVModel::Kind::SABR || model.beta() >= 1.0;
    const std::size_t n_finest = *std::max_element(n_space_list.begin(), n_space_list.end());

    struct PerSample {
        std::vector<std::vector<double>> fd1, fd2, ref;  // per n_space
    };
    std::vector<PerSample> rows(cfg.m_samples);

    parallel_for(cfg.m_samples, cfg.workers, [&](std::size_t m) {
        LSVModel local = model;
        const auto sample =
            simulate_backbone(vol, fine, derive_seed(cfg.seed, kStreamBackbone, m));
        const auto lift = integrate_vol(sample);
        const auto driver = coarsen(lift, pgrid);
        const double y_T = driver.rp.y.back();
        const double br_T = driver.br.values.back();

        // Per-sample +-6-std domain around x0 unless one was pinned: the
        // realized vols of the backbone spread over orders of magnitude, so
        // no fixed window resolves every conditional density.
        auto sample_grid = [&](std::size_t n_space) {
            if (cfg.domain)
                return SpaceGrid(cfg.domain->first, cfg.domain->second, n_space);
            const auto c0 = local.coeffs(0.0, cfg.x0);
            const double s_loc = std::sqrt(c0.f * c0.f + c0.g * c0.g);
            const double s = std::max(s_loc * std::sqrt(br_T), 1e-4 * cfg.x0);
            double lo = cfg.x0 - 6.0 * s, hi = cfg.x0 + 6.0 * s;
            if (local.multiplicative()) lo = std::max(lo, 0.02 * cfg.x0);
            return SpaceGrid(lo, hi, n_space);
        };

        // reference on the finest grid when only the oracle is available
        const SpaceGrid finest = sample_grid(n_finest);
        std::vector<double> oracle_vals;
        if (!has_closed_form) {
            oracle_vals.resize(finest.size());
            for (std::size_t n = 0; n < finest.size(); ++n) {
                oracle_vals[n] = conditional_sde_price(
                                     local, payoff, lift, finest.node(n), cfg.inner_m,
                                     derive_seed(cfg.seed, kStreamInnerB, m * 1000 + n))
                                     .mean;
            }
        }
        auto oracle_at = [&](double x) {
            const double pos = (x - finest.a) / finest.dx();
            const std::size_t i =
                std::min(static_cast<std::size_t>(std::max(pos, 0.0)), finest.n_space - 1);
            const double w = pos - static_cast<double>(i);
            return oracle_vals[i] + w * (oracle_vals[i + 1] - oracle_vals[i]);
        };

        auto& row = rows[m];
        for (std::size_t n_space : n_space_list) {
            const SpaceGrid sg = sample_grid(n_space);

            std::vector<double> ref(sg.size());
            for (std::size_t n = 0; n < sg.size(); ++n) {
                if (model.kind() == LSVModel::Kind::BachelierSV)
                    ref[n] = rt_bachelier(payoff, sg.node(n), local.rho(), y_T, br_T);
                else if (has_closed_form)
                    ref[n] = rt_blackscholes(payoff, sg.node(n), local.rho(), y_T, br_T);
                else
                    ref[n] = oracle_at(sg.node(n));
            }

            BoundaryValues bv;
            if (has_closed_form) {
                bv = resolve_boundary(cfg.boundary.value_or(BoundaryKind::ClosedForm), local,
                                      payoff, driver, sg.a, sg.b);
            } else {
                bv = resolve_boundary(cfg.boundary.value_or(BoundaryKind::ConditionalMean),
                                      local, payoff, driver, sg.a, sg.b);
            }
            auto f1 = solve_rpde(local, payoff, driver, sg, SchemeOrder::Order1, bv);
            auto f2 = solve_rpde(local, payoff, driver, sg, SchemeOrder::Order2, bv);
            row.fd1.emplace_back(f1.row(0), f1.row(0) + sg.size());
            row.fd2.emplace_back(f2.row(0), f2.row(0) + sg.size());
            row.ref.push_back(std::move(ref));
        }
    });

    ConvergenceResult result;
    result.n_space = n_space_list;
    for (std::size_t q = 0; q < n_space_list.size(); ++q) {
        std::vector<std::vector<double>> fd1, fd2, ref;
        for (auto& r : rows) {
            fd1.push_back(r.fd1[q]);
            fd2.push_back(r.fd2[q]);
            ref.push_back(r.ref[q]);
        }
        result.eps_order1.push_back(strong_relative_error(fd1, ref));
        result.eps_order2.push_back(strong_relative_error(fd2, ref));
    }
    return result;
}

} // namespace rvp
