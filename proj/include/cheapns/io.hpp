#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cheapns/certifier.hpp"
#include "cheapns/duhamel.hpp"
#include "cheapns/field.hpp"

namespace cheapns {

namespace detail {

/// 17 significant digits: lossless decimal round trip for doubles.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline nlohmann::json field_to_json(const SpectralField& f) {
    nlohmann::json j;
    j["dim"] = f.grid.dim;
    j["dxi"] = f.grid.dxi;
    j["xi_max"] = f.grid.xi_max;
    j["exp2"] = f.exp2;
    j["coeffs"] = f.coeffs;
    return j;
}

inline SpectralField field_from_json(const nlohmann::json& j) {
    FrequencyGrid grid = make_grid(j.at("dim").get<int>(), j.at("dxi").get<double>(),
                                   j.at("xi_max").get<double>());
    SpectralField f;
    f.grid = grid;
    f.exp2 = j.at("exp2").get<std::int64_t>();
    f.coeffs = j.at("coeffs").get<std::vector<double>>();
    if (f.coeffs.size() != grid.size())
        throw std::invalid_argument("field_from_json: coeff count " +
                                    std::to_string(f.coeffs.size()) + " does not match grid (" +
                                    std::to_string(grid.size()) + ")");
    require_valid(f, "field_from_json");
    return f;
}

inline void write_field(const std::string& path, const SpectralField& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << field_to_json(f).dump(2) << "\n";
}

inline SpectralField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    return field_from_json(j);
}

/// Trajectory CSV: header, one row per recorded snapshot, and a trailing
/// comment line with the termination record.
inline void trajectory_to_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,exp2,log2_max,log2_mass";
    for (double a : traj.a_list) {
        std::ostringstream lbl;
        lbl << a;
        out << ",besov_a=" << lbl.str();
    }
    out << ",shell_origin";
    for (int k : traj.shell_keys) out << ",shell_" << k;
    out << "\n";
    for (const auto& d : traj.diags) {
        out << detail::fmt17(d.t) << "," << d.exp2 << "," << detail::fmt17(d.log2_max) << ","
            << detail::fmt17(d.log2_mass);
        for (double b : d.besov_log2) out << "," << detail::fmt17(b);
        out << "," << detail::fmt17(d.origin_log2);
        for (double s : d.shell_log2) out << "," << detail::fmt17(s);
        out << "\n";
    }
    if (traj.termination == Termination::completed) {
        out << "# termination=completed\n";
    } else {
        out << "# termination=numeric_blowup t=" << detail::fmt17(traj.blowup_time)
            << " bits=" << detail::fmt17(traj.blowup_bits) << "\n";
    }
}

/// Certificates serialize with -inf encoded as null (JSON has no infinity).
inline nlohmann::json certificate_to_json(const CascadeCertificate& cert) {
    auto enc = [](double v) -> nlohmann::json {
        if (std::isinf(v) && v < 0.0) return nullptr;
        return v;
    };
    nlohmann::json j;
    j["A_log2"] = cert.A_log2;
    j["a"] = cert.a;
    j["t"] = cert.t;
    j["verdict"] = to_string(cert.verdict);
    if (cert.failed_stage) j["failed_stage"] = *cert.failed_stage;
    j["stages"] = nlohmann::json::array();
    for (const auto& st : cert.stages) {
        nlohmann::json s;
        s["k"] = st.k;
        s["t_k"] = st.t_k;
        s["alpha_log2"] = enc(st.alpha_log2.bits);
        s["step_margin_bits"] = enc(st.step_margin_bits);
        s["besov_lb_log2"] = st.besov_lb_log2;
        j["stages"].push_back(s);
    }
    return j;
}

} // namespace cheapns
