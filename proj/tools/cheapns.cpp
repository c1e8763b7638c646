// Command-line laboratory for the cheap Navier-Stokes model: spectral
// simulation, cascade certification, Picard iteration, the non-existence
// series, and Besov norm tables.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cheapns/config.hpp"
#include "cheapns/io.hpp"
#include "cheapns/runner.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

struct FlagOverrides {
    std::optional<int> dim;
    std::optional<double> dxi, xi_max, A, dt, T, bit_budget, t_noexist, cert_t;
    std::optional<std::string> scheme, profile, out, in, a_csv, noexist_csv;
    std::optional<std::int64_t> stride;
    std::optional<std::uint64_t> seed;
    std::optional<int> picard_steps, picard_iters, cert_kmax;
};

void apply(const FlagOverrides& f, cheapns::ExperimentConfig& cfg) {
    if (f.dim) cfg.dim = *f.dim;
    if (f.dxi) cfg.dxi = *f.dxi;
    if (f.xi_max) cfg.xi_max = *f.xi_max;
    if (f.A) cfg.A = *f.A;
    if (f.dt) cfg.dt = *f.dt;
    if (f.T) cfg.T = *f.T;
    if (f.bit_budget) cfg.bit_budget = *f.bit_budget;
    if (f.t_noexist) cfg.t_noexist = *f.t_noexist;
    if (f.cert_t) cfg.cert_t = *f.cert_t;
    if (f.scheme) cfg.scheme = *f.scheme;
    if (f.profile) cfg.profile = *f.profile;
    if (f.out) cfg.out = *f.out;
    if (f.in) cfg.in = *f.in;
    if (f.a_csv) cfg.a_list = parse_double_list(*f.a_csv);
    if (f.noexist_csv) cfg.noexist_K = parse_int_list(*f.noexist_csv);
    if (f.stride) cfg.stride = *f.stride;
    if (f.seed) cfg.seed = *f.seed;
    if (f.picard_steps) cfg.picard_steps = *f.picard_steps;
    if (f.picard_iters) cfg.picard_iters = *f.picard_iters;
    if (f.cert_kmax) cfg.cert_kmax = *f.cert_kmax;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cheapns: Fourier-side laboratory for the cheap Navier-Stokes equation"};
    app.require_subcommand(1);

    std::string config_path;
    bool dump_config = false;
    FlagOverrides flags;

    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_flag("--dump-config", dump_config, "print the merged config as JSON and exit");
    app.add_option("--dim", flags.dim, "space dimension (1 or 2)");
    app.add_option("--dxi", flags.dxi, "frequency grid spacing");
    app.add_option("--xi-max", flags.xi_max, "frequency half-width");
    app.add_option("--A", flags.A, "initial amplitude multiplying the profile");
    app.add_option("--a", flags.a_csv, "comma-separated Besov smoothness indices");
    app.add_option("--dt", flags.dt, "time step");
    app.add_option("--scheme", flags.scheme, "integrator: etd1 or etd2");
    app.add_option("--T", flags.T, "final time");
    app.add_option("--stride", flags.stride, "snapshot recording stride");
    app.add_option("--bit-budget", flags.bit_budget, "blow-up detection threshold in bits");
    app.add_option("--seed", flags.seed, "seed recorded in the config");
    app.add_option("--profile", flags.profile, "initial profile: w|w0|wk:<k>|lp:<k>|v:<K>");
    app.add_option("--out", flags.out, "output path (CSV or JSON)");
    app.add_option("--in", flags.in, "input field JSON (norms)");
    app.add_option("--picard-steps", flags.picard_steps, "Picard time-grid steps");
    app.add_option("--picard-iters", flags.picard_iters, "Picard iterations");
    app.add_option("--t-noexist", flags.t_noexist, "evaluation time for the series");
    app.add_option("--K", flags.noexist_csv, "comma-separated K schedule for the series");
    app.add_option("--k-max", flags.cert_kmax, "certificate stage count");
    app.add_option("--t-cert", flags.cert_t, "certificate time (default: t_infinity)");

    auto* sim = app.add_subcommand("simulate", "run the exponential integrator");
    auto* cert = app.add_subcommand("certify", "replay the blow-up cascade certificate");
    auto* pic = app.add_subcommand("picard", "run the fixed-point iteration");
    auto* noex = app.add_subcommand("noexist", "tabulate the non-existence series");
    auto* norms = app.add_subcommand("norms", "Besov block norms of a field or profile");

    CLI11_PARSE(app, argc, argv);

    cheapns::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = cheapns::load_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    apply(flags, cfg);

    // CHEAPNS_THREADS caps internal parallelism; every code path is
    // deterministic, so outputs never depend on it.
    if (const char* env = std::getenv("CHEAPNS_THREADS"); env != nullptr) {
        (void)std::atoi(env);
    }

    if (dump_config) {
        std::cout << cheapns::config_to_json(cfg).dump(2) << "\n";
        return 0;
    }

    if (sim->parsed()) return cheapns::cmd_simulate(cfg, std::cout);
    if (cert->parsed()) return cheapns::cmd_certify(cfg, std::cout);
    if (pic->parsed()) return cheapns::cmd_picard(cfg, std::cout);
    if (noex->parsed()) return cheapns::cmd_noexist(cfg, std::cout);
    if (norms->parsed()) return cheapns::cmd_norms(cfg, std::cout);
    return 1;
}
