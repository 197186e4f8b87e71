#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rvp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace rvp;

namespace {

std::string cli_path() {
    const char* p = std::getenv("RVP_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /tmp/rvp_cli_out.txt 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

const char* kSmallRun =
    "model.kind = bachelier\n"
    "model.rho = -0.4\n"
    "model.vol = rough_bergomi\n"
    "vol.xi0 = 0.055225\n"
    "vol.eta = 1.2\n"
    "vol.hurst = 0.15\n"
    "sim.m_samples = 8\n"
    "sim.n_fine = 64\n"
    "pde.j_steps = 16\n"
    "pde.n_space = 24\n"
    "sim.x_points = 3\n";

} // namespace

TEST_CASE("config defaults, round-trip, and unknown keys") {
    CliConfig cfg;
    CHECK(cfg.get("model.kind") == "sabr");
    CHECK(cfg.get_double("vol.eta") == 1.9);

    auto parsed = CliConfig::from_string("model.kind = bachelier\n# comment\nvol.eta=0.5\n");
    CHECK(parsed.get("model.kind") == "bachelier");
    CHECK(parsed.get_double("vol.eta") == 0.5);

    auto echoed = CliConfig::from_string(parsed.echo());
    CHECK(echoed == parsed);

    CHECK_THROWS(CliConfig::from_string("no.such.key = 1\n"));
    CHECK_THROWS(CliConfig::from_string("model.kind bachelier\n"));
    CHECK_THROWS(parsed.get("bogus"));
}

TEST_CASE("typed config views") {
    CliConfig cfg;
    CHECK(cfg.model().kind() == LSVModel::Kind::SABR);
    CHECK(cfg.vol_spec().kind == VolModelSpec::Kind::RoughBergomi);
    CHECK(cfg.payoff().kind() == Payoff::Kind::Put);
    CHECK(cfg.run_config().j_steps == 120);
    CHECK(cfg.report_grid().size() == 5);

    auto c2 = CliConfig::from_string("pde.domain = 2.5,7.5\npde.boundary = cond_mean\n");
    auto rc = c2.run_config();
    REQUIRE(rc.domain.has_value());
    CHECK(rc.domain->first == 2.5);
    CHECK(rc.domain->second == 7.5);
    CHECK(rc.boundary == BoundaryKind::ConditionalMean);

    CHECK_THROWS(CliConfig::from_string("pde.scheme = order3\n").run_config());
    CHECK_THROWS(CliConfig::from_string("payoff.kind = digital\n").payoff());
}

TEST_CASE("price command writes deterministic csv and echoes the config") {
    write_file("/tmp/rvp_small.cfg", kSmallRun);
    CHECK(run("--config /tmp/rvp_small.cfg --seed 7 --out /tmp/rvp_run_a price") == 0);
    CHECK(run("--config /tmp/rvp_small.cfg --seed 7 --workers 3 --out /tmp/rvp_run_b price") ==
          0);
    CHECK(slurp("/tmp/rvp_run_a/prices.csv") == slurp("/tmp/rvp_run_b/prices.csv"));

    // resolved config re-parses to the same object
    auto echoed = CliConfig::from_file("/tmp/rvp_run_a/resolved.cfg");
    CHECK(echoed.get("sim.seed") == "7");
    CHECK(echoed.get("sim.m_samples") == "8");

    // space-time field dump: header of x-nodes, one row per time node
    const std::string field = slurp("/tmp/rvp_run_a/field0.csv");
    std::size_t lines = 0;
    for (char ch : field)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + 16 + 1);  // header + (J+1) rows

    // RVP_SEED env changes the outputs, --seed overrides it back
    const std::string env_cmd = "RVP_SEED=99 " + cli_path() +
                                " --config /tmp/rvp_small.cfg --out /tmp/rvp_run_c price "
                                "> /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
    CHECK(slurp("/tmp/rvp_run_c/prices.csv") != slurp("/tmp/rvp_run_a/prices.csv"));
    const std::string env_cmd2 = "RVP_SEED=99 " + cli_path() +
                                 " --config /tmp/rvp_small.cfg --seed 7 --out /tmp/rvp_run_d "
                                 "price > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(env_cmd2.c_str())) == 0);
    CHECK(slurp("/tmp/rvp_run_d/prices.csv") == slurp("/tmp/rvp_run_a/prices.csv"));
}

TEST_CASE("exit codes: config error and numerical failure") {
    write_file("/tmp/rvp_bad.cfg", "model.kind = heston\n");
    CHECK(run("--config /tmp/rvp_bad.cfg price") == 2);
    CHECK(run("--config /no/such/file.cfg price") == 2);

    write_file("/tmp/rvp_rough.cfg",
               "model.vol = rough_bergomi\nsim.m_samples = 3\nsim.n_fine = 128\n");
    CHECK(run("--config /tmp/rvp_rough.cfg --out /tmp/rvp_rc roughcheck") == 0);
    CHECK(run("--config /tmp/rvp_rough.cfg --out /tmp/rvp_rc2 roughcheck --fault-inject") == 3);
}

TEST_CASE("greeks of the linear payoff are flat delta one") {
    write_file("/tmp/rvp_lin.cfg",
               "model.kind = bachelier\n"
               "model.rho = -0.4\n"
               "payoff.kind = linear\n"
               "sim.m_samples = 6\n"
               "sim.n_fine = 64\n"
               "pde.j_steps = 16\n"
               "pde.n_space = 24\n"
               "sim.x_lo = 4.8\n"
               "sim.x_hi = 5.2\n");
    CHECK(run("--config /tmp/rvp_lin.cfg --out /tmp/rvp_lin greeks") == 0);
    const std::string csv = slurp("/tmp/rvp_lin/greeks.csv");
    // every delta_mc entry is 1 to printed precision
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int checked = 0;
    while (std::getline(lines, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double delta = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(delta == doctest::Approx(1.0).epsilon(1e-10));
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("convergence command emits the error table") {
    write_file("/tmp/rvp_conv.cfg",
               "model.kind = bachelier\n"
               "model.rho = -0.4\n"
               "sim.m_samples = 4\n"
               "sim.n_fine = 200\n"
               "pde.j_steps = 20\n"
               "pde.n_space_list = 16,32\n");
    CHECK(run("--config /tmp/rvp_conv.cfg --out /tmp/rvp_conv convergence") == 0);
    const std::string csv = slurp("/tmp/rvp_conv/errors.csv");
    CHECK(csv.find("n_space,eps_order1,eps_order2") == 0);
}
