#include "rvp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rvp {

namespace {

const std::map<std::string, std::string>& default_values() {
    static const std::map<std::string, std::string> defaults = {
        {"model.kind", "sabr"},            // bachelier | blackscholes | sabr
        {"model.rho", "-0.4"},
        {"model.beta", "0.6"},
        {"model.vol", "rough_bergomi"},    // constant | rough_bergomi
        {"vol.vbar", "0.235"},
        {"vol.xi0", "0.055225"},
        {"vol.eta", "1.9"},
        {"vol.hurst", "0.07"},
        {"payoff.kind", "put"},            // put | call | linear
        {"payoff.strike", "5.0"},
        {"payoff.smoothing", "auto"},      // auto | width >= 0
        {"pde.scheme", "order2"},          // order1 | order2
        {"pde.j_steps", "120"},
        {"pde.n_space", "90"},
        {"pde.domain", "auto"},            // auto | "a,b"
        {"pde.boundary", "auto"},          // auto | closed_form | cond_mean | frozen
        {"pde.n_space_list", "30,60,90"},  // convergence sweep
        {"sim.m_samples", "1000"},
        {"sim.n_fine", "2000"},
        {"sim.seed", "1"},
        {"sim.inner_m", "20000"},
        {"sim.x0", "5.0"},
        {"sim.maturity", "1.0"},
        {"sim.workers", "0"},
        {"sim.fd_bump", "0.05"},
        {"sim.x_lo", "4.0"},
        {"sim.x_hi", "6.0"},
        {"sim.x_points", "5"},
        {"output.dir", "out"},
    };
    return defaults;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

CliConfig::CliConfig() : values_(default_values()) {}

CliConfig CliConfig::from_string(const std::string& text) {
    CliConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

CliConfig CliConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

const std::string& CliConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("config: unknown key " + key);
    return it->second;
}

void CliConfig::set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end())
        throw std::invalid_argument("config: unknown key " + key);
    values_[key] = value;
}

double CliConfig::get_double(const std::string& key) const {
    std::size_t pos = 0;
    const std::string& v = get(key);
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: bad number for " + key);
    return x;
}

std::size_t CliConfig::get_size(const std::string& key) const {
    const double x = get_double(key);
    if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x)))
        throw std::invalid_argument("config: bad count for " + key);
    return static_cast<std::size_t>(x);
}

std::vector<std::size_t> CliConfig::get_size_list(const std::string& key) const {
    std::vector<std::size_t> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoul(item)));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

std::string CliConfig::echo() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    return out.str();
}

LSVModel CliConfig::model() const {
    const std::string& kind = get("model.kind");
    const double rho = get_double("model.rho");
    LSVModel m = kind == "bachelier"      ? LSVModel::bachelier(rho)
                 : kind == "blackscholes" ? LSVModel::black_scholes(rho)
                 : kind == "sabr"         ? LSVModel::sabr(rho, get_double("model.beta"))
                                          : throw std::invalid_argument(
                                                "config: model.kind must be "
                                                "bachelier|blackscholes|sabr");
    m.set_x_floor(1e-8 * get_double("payoff.strike"));
    return m;
}

VolModelSpec CliConfig::vol_spec() const {
    const std::string& kind = get("model.vol");
    if (kind == "constant") return VolModelSpec::constant(get_double("vol.vbar"));
    if (kind == "rough_bergomi")
        return VolModelSpec::rough_bergomi(get_double("vol.xi0"), get_double("vol.eta"),
                                           get_double("vol.hurst"));
    throw std::invalid_argument("config: model.vol must be constant|rough_bergomi");
}

Payoff CliConfig::payoff() const {
    const std::string& kind = get("payoff.kind");
    const double strike = get_double("payoff.strike");
    double w = 0.0;
    if (get("payoff.smoothing") == "auto") {
        // additive models can reach negative prices; blend over half a
        // default space step
        if (get("model.kind") == "bachelier") {
            const double span = 12.0 * get_double("vol.xi0") *
                                std::sqrt(get_double("sim.maturity"));
            w = 0.5 * span / static_cast<double>(get_size("pde.n_space"));
        }
    } else {
        w = get_double("payoff.smoothing");
    }
    if (kind == "put") return Payoff::put(strike, w);
    if (kind == "call") return Payoff::call(strike, w);
    if (kind == "linear") return Payoff::sampled({0.0, 1.0}, {0.0, 1.0});
    throw std::invalid_argument("config: payoff.kind must be put|call|linear");
}

RunConfig CliConfig::run_config() const {
    RunConfig rc;
    rc.m_samples = get_size("sim.m_samples");
    rc.n_fine = get_size("sim.n_fine");
    rc.j_steps = get_size("pde.j_steps");
    rc.n_space = get_size("pde.n_space");
    rc.maturity = get_double("sim.maturity");
    rc.x0 = get_double("sim.x0");
    rc.seed = static_cast<std::uint64_t>(get_size("sim.seed"));
    rc.inner_m = get_size("sim.inner_m");
    rc.fd_bump = get_double("sim.fd_bump");
    rc.workers = get_size("sim.workers");

    const std::string& scheme = get("pde.scheme");
    if (scheme == "order1")
        rc.scheme = SchemeOrder::Order1;
    else if (scheme == "order2")
        rc.scheme = SchemeOrder::Order2;
    else
        throw std::invalid_argument("config: pde.scheme must be order1|order2");

    const std::string& dom = get("pde.domain");
    if (dom != "auto") {
        const auto comma = dom.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("config: pde.domain must be auto or \"a,b\"");
        rc.domain = {{std::stod(dom.substr(0, comma)), std::stod(dom.substr(comma + 1))}};
    }

    const std::string& bk = get("pde.boundary");
    if (bk == "closed_form")
        rc.boundary = BoundaryKind::ClosedForm;
    else if (bk == "cond_mean")
        rc.boundary = BoundaryKind::ConditionalMean;
    else if (bk == "frozen")
        rc.boundary = BoundaryKind::FrozenPayoff;
    else if (bk != "auto")
        throw std::invalid_argument(
            "config: pde.boundary must be auto|closed_form|cond_mean|frozen");
    return rc;
}

std::vector<double> CliConfig::report_grid() const {
    const double lo = get_double("sim.x_lo"), hi = get_double("sim.x_hi");
    const std::size_t n = get_size("sim.x_points");
    if (!(lo < hi) || n < 2)
        throw std::invalid_argument("config: need sim.x_lo < sim.x_hi and sim.x_points >= 2");
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

} // namespace rvp
