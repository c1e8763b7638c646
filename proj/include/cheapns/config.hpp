#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cheapns {

/// One experiment configuration, shared by every subcommand. Values come
/// from an optional JSON document plus command-line flags; flags win.
struct ExperimentConfig {
    int dim = 1;
    double dxi = 1.0 / 16.0;
    double xi_max = 64.0;
    double A = 40.0;
    std::vector<double> a_list = {0.0};
    double dt = 1e-4;
    std::string scheme = "etd1";
    double T = 0.5;
    std::int64_t stride = 10;
    double bit_budget = 4096.0;
    std::uint64_t seed = 12345;
    std::string profile = "w";
    std::string out;
    std::string in;

    int picard_steps = 100;
    int picard_iters = 40;

    double t_noexist = 0.1;
    std::vector<int> noexist_K = {1, 10, 100, 1000};

    int cert_kmax = 60;
    double cert_t = -1.0; // < 0 means "use t_infinity()"
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["dim"] = c.dim;
    j["dxi"] = c.dxi;
    j["xi_max"] = c.xi_max;
    j["A"] = c.A;
    j["a_list"] = c.a_list;
    j["dt"] = c.dt;
    j["scheme"] = c.scheme;
    j["T"] = c.T;
    j["stride"] = c.stride;
    j["bit_budget"] = c.bit_budget;
    j["seed"] = c.seed;
    j["profile"] = c.profile;
    j["out"] = c.out;
    j["in"] = c.in;
    j["picard_steps"] = c.picard_steps;
    j["picard_iters"] = c.picard_iters;
    j["t_noexist"] = c.t_noexist;
    j["noexist_K"] = c.noexist_K;
    j["cert_kmax"] = c.cert_kmax;
    j["cert_t"] = c.cert_t;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("dim", c.dim);
    get("dxi", c.dxi);
    get("xi_max", c.xi_max);
    get("A", c.A);
    get("a_list", c.a_list);
    get("dt", c.dt);
    get("scheme", c.scheme);
    get("T", c.T);
    get("stride", c.stride);
    get("bit_budget", c.bit_budget);
    get("seed", c.seed);
    get("profile", c.profile);
    get("out", c.out);
    get("in", c.in);
    get("picard_steps", c.picard_steps);
    get("picard_iters", c.picard_iters);
    get("t_noexist", c.t_noexist);
    get("noexist_K", c.noexist_K);
    get("cert_kmax", c.cert_kmax);
    get("cert_t", c.cert_t);
    return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

inline void validate(const ExperimentConfig& c) {
    if (c.dim != 1 && c.dim != 2) throw std::invalid_argument("config: dim must be 1 or 2");
    if (!(c.dxi > 0.0)) throw std::invalid_argument("config: dxi must be positive");
    if (!(c.xi_max > 0.0)) throw std::invalid_argument("config: xi_max must be positive");
    if (!(c.A >= 0.0)) throw std::invalid_argument("config: A must be nonnegative");
    if (!(c.dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
    if (!(c.T > 0.0)) throw std::invalid_argument("config: T must be positive");
    if (c.stride < 1) throw std::invalid_argument("config: stride must be >= 1");
    if (!(c.bit_budget > 0.0)) throw std::invalid_argument("config: bit_budget must be positive");
    if (c.scheme != "etd1" && c.scheme != "etd2")
        throw std::invalid_argument("config: scheme must be etd1 or etd2");
    if (c.picard_steps < 1) throw std::invalid_argument("config: picard_steps must be >= 1");
    if (c.picard_iters < 1) throw std::invalid_argument("config: picard_iters must be >= 1");
    if (c.cert_kmax < 0) throw std::invalid_argument("config: cert_kmax must be >= 0");
}

} // namespace cheapns
