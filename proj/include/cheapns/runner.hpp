#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "cheapns/config.hpp"
#include "cheapns/duhamel.hpp"
#include "cheapns/io.hpp"
#include "cheapns/profiles.hpp"

namespace cheapns {

// Exit codes: 0 success, 1 operational error, 2 numeric blow-up,
// 3 certificate stage failure, 4 Picard divergence. Scientific outcomes
// get their own codes so shell harnesses can assert them directly.

namespace detail {

inline SchemeSpec scheme_from_config(const ExperimentConfig& cfg) {
    SchemeSpec s;
    s.kind = cfg.scheme == "etd2" ? SchemeKind::etd2 : SchemeKind::etd1;
    s.dt = cfg.dt;
    return s;
}

inline SpectralField initial_datum(const ExperimentConfig& cfg) {
    FrequencyGrid grid = make_grid(cfg.dim, cfg.dxi, cfg.xi_max);
    return scale_field(make_profile_by_name(cfg.profile, grid), cfg.A);
}

} // namespace detail

inline int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        validate(cfg);
        SpectralField u0 = detail::initial_datum(cfg);
        SimOptions opts;
        opts.stride = cfg.stride;
        opts.bit_budget = cfg.bit_budget;
        opts.a_list = cfg.a_list;
        Trajectory traj = simulate(u0, cfg.T, detail::scheme_from_config(cfg), opts);
        std::string path = cfg.out.empty() ? "trajectory.csv" : cfg.out;
        std::ofstream csv(path);
        if (!csv) throw std::runtime_error("cannot open for writing: " + path);
        trajectory_to_csv(csv, traj);
        if (traj.termination == Termination::numeric_blowup) {
            log << "termination=numeric_blowup t=" << detail::fmt17(traj.blowup_time)
                << " bits=" << detail::fmt17(traj.blowup_bits) << "\n";
            return 2;
        }
        log << "termination=completed steps=" << traj.times.size() << "\n";
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_certify(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        validate(cfg);
        double t = cfg.cert_t < 0.0 ? t_infinity() : cfg.cert_t;
        double A_log2 = std::log2(cfg.A);
        double a = cfg.a_list.empty() ? 0.0 : cfg.a_list.front();
        CascadeCertificate cert = build_certificate(A_log2, a, cfg.cert_kmax, t);
        log << "k     t_k                 alpha_log2       step_margin  besov_lb_log2\n";
        for (const auto& st : cert.stages) {
            log << std::left << std::setw(6) << st.k << std::setw(20) << st.t_k << std::setw(17)
                << st.alpha_log2.bits << std::setw(13) << st.step_margin_bits << st.besov_lb_log2
                << "\n";
        }
        log << "verdict=" << to_string(cert.verdict) << "\n";
        if (!cfg.out.empty()) {
            std::ofstream out(cfg.out);
            if (!out) throw std::runtime_error("cannot open for writing: " + cfg.out);
            out << certificate_to_json(cert).dump(2) << "\n";
        }
        if (cert.failed_stage) {
            log << "stage_margin_failure at k=" << *cert.failed_stage << "\n";
            return 3;
        }
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_picard(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        validate(cfg);
        SpectralField u0 = detail::initial_datum(cfg);
        PicardResult res = picard_iterate(u0, cfg.T, cfg.picard_steps, cfg.picard_iters,
                                          cfg.bit_budget);
        log << "iter  residual_log2       ratio\n";
        for (std::size_t m = 0; m < res.residual_log2.size(); ++m) {
            log << std::left << std::setw(6) << m << std::setw(20) << res.residual_log2[m];
            if (m > 0) {
                double ratio = std::exp2(res.residual_log2[m] - res.residual_log2[m - 1]);
                log << ratio;
            }
            log << "\n";
        }
        if (res.overflow_iteration) {
            log << "divergence: overflow at iteration " << *res.overflow_iteration << "\n";
            return 4;
        }
        // Divergence also shows as residuals that stop contracting.
        if (res.residual_log2.size() >= 2 &&
            res.residual_log2.back() > res.residual_log2.front()) {
            log << "divergence: residuals increasing\n";
            return 4;
        }
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_noexist(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        validate(cfg);
        if (!(cfg.t_noexist > 0.0))
            throw std::invalid_argument("noexist: t must be positive");
        log << "K       S_K(t)              S_K(t)/K\n";
        for (int K : cfg.noexist_K) {
            double s = noexist_partial_sum(K, cfg.t_noexist);
            log << std::left << std::setw(8) << K << std::setw(20) << detail::fmt17(s)
                << detail::fmt17(s / K) << "\n";
        }
        if (cfg.xi_max < 2.0)
            throw std::invalid_argument("noexist: xi_max must be >= 2 to hold the "
                                        "self-convolved annulus support");
        FrequencyGrid grid = make_grid(cfg.dim, cfg.dxi, cfg.xi_max);
        NoexistBound nb = first_iterate_lower_bound(grid, cfg.noexist_K.front(), cfg.t_noexist);
        log << "profile_mass_log2=" << detail::fmt17(nb.profile_mass_log2)
            << " bound_sup_log2=" << detail::fmt17(sup_log2(nb.field).bits) << "\n";
        if (!cfg.out.empty()) write_field(cfg.out, nb.field);
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_norms(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        validate(cfg);
        SpectralField f;
        if (!cfg.in.empty()) {
            f = read_field(cfg.in);
        } else {
            FrequencyGrid grid = make_grid(cfg.dim, cfg.dxi, cfg.xi_max);
            f = make_profile_by_name(cfg.profile, grid);
        }
        for (double a : cfg.a_list) {
            BesovProfile p = besov_norm(f, a);
            log << "a=" << a << "\n";
            log << "  k     block_log2\n";
            for (const auto& [k, b] : p.block_log2)
                log << "  " << std::left << std::setw(6) << k << b.bits << "\n";
            log << "  norm_log2=" << detail::fmt17(p.norm_log2.bits) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace cheapns
