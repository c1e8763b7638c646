#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapns/besov.hpp"
#include "cheapns/field.hpp"
#include "cheapns/ops.hpp"

namespace cheapns {

enum class SchemeKind { etd1, etd2 };

/// Exponential-integrator step specification. The nonlinearity switch is a
/// test hook: with it off, a step is exactly the heat multiplier.
struct SchemeSpec {
    SchemeKind kind = SchemeKind::etd1;
    double dt = 1e-4;
    bool nonlinearity = true;
};

namespace detail {

/// phi1 weight dt*(1-e^{-x})/x evaluated as a function of x = dt|xi|^2;
/// returned already divided by |xi|^2 (i.e. (1-e^{-x})/|xi|^2), with the
/// x -> 0 limit dt handled by series to avoid cancellation.
inline double etd_q_weight(double dt, double xi_sq) {
    double x = dt * xi_sq;
    if (x < 1e-8) return dt * (1.0 - 0.5 * x + x * x / 6.0);
    return -std::expm1(-x) / xi_sq;
}

/// Second-order correction weight dt*phi2(-x) = (e^{-x}-1+x)/(dt |xi|^4).
inline double etd_q2_weight(double dt, double xi_sq) {
    double x = dt * xi_sq;
    if (x < 0.1) {
        // (e^{-x}-1+x)/x^2 = 1/2 - x/6 + x^2/24 - x^3/120 + x^4/720
        double s = 0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 + x * (-1.0 / 120.0 + x / 720.0)));
        return dt * s;
    }
    return (std::exp(-x) - 1.0 + x) / (dt * xi_sq * xi_sq);
}

/// |xi| * (f*f)(xi) with the shared exponent carried through.
inline SpectralField nonlinearity(const SpectralField& f) {
    SpectralField nl = convolve(f, f);
    for (std::size_t i = 0; i < nl.coeffs.size(); ++i)
        nl.coeffs[i] *= nl.grid.xi_norm(i);
    return nl;
}

} // namespace detail

/// One step of the mild-solution integrator.
///
/// etd1 propagates the linear part exactly and freezes the nonlinearity at
/// the left endpoint: out = e^{-dt|xi|^2} f + |xi| q(xi) (f*f), every term
/// nonnegative, so positivity and data-monotonicity hold structurally.
/// etd2 adds the trapezoidal exponential correction evaluated at an etd1
/// predictor; its correction is signed, so the output is clamped at zero.
inline SpectralField duhamel_step(const SpectralField& f, const SchemeSpec& scheme) {
    if (!(scheme.dt > 0.0)) throw std::invalid_argument("duhamel_step: dt must be positive");
    require_valid(f, "duhamel_step");

    SpectralField lin = f;
    for (std::size_t i = 0; i < lin.coeffs.size(); ++i)
        lin.coeffs[i] *= std::exp(-scheme.dt * lin.grid.xi_norm_sq(i));
    if (!scheme.nonlinearity) return renormalize(std::move(lin));

    SpectralField nf = detail::nonlinearity(f);
    SpectralField quad = nf;
    for (std::size_t i = 0; i < quad.coeffs.size(); ++i)
        quad.coeffs[i] *= detail::etd_q_weight(scheme.dt, quad.grid.xi_norm_sq(i));
    SpectralField out = add_fields(lin, quad);

    if (scheme.kind == SchemeKind::etd2) {
        SpectralField np = detail::nonlinearity(out); // predictor = etd1 output
        std::int64_t e = std::max(np.exp2, nf.exp2);
        SpectralField corr = zero_field(out.grid);
        corr.even = np.even && nf.even;
        corr.exp2 = e;
        int sp = static_cast<int>(np.exp2 - e);
        int sf = static_cast<int>(nf.exp2 - e);
        for (std::size_t i = 0; i < corr.coeffs.size(); ++i) {
            double d = std::ldexp(np.coeffs[i], sp) - std::ldexp(nf.coeffs[i], sf);
            corr.coeffs[i] = d * detail::etd_q2_weight(scheme.dt, corr.grid.xi_norm_sq(i));
        }
        std::int64_t eo = std::max(out.exp2, corr.exp2);
        int so = static_cast<int>(out.exp2 - eo);
        int sc = static_cast<int>(corr.exp2 - eo);
        for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
            double v = std::ldexp(out.coeffs[i], so) + std::ldexp(corr.coeffs[i], sc);
            out.coeffs[i] = std::max(0.0, v);
        }
        out.exp2 = eo;
        out.even = out.even && corr.even;
    }
    return renormalize(std::move(out));
}

struct MonotoneViolation {
    std::size_t bin = 0;
    double lesser_log2 = 0.0;
    double greater_log2 = 0.0;
};

/// Comparison principle for the discrete step operator: for 0 <= f <= g
/// pointwise, the step preserves the ordering. Returns the first violating
/// bin, or nullopt on pass.
inline std::optional<MonotoneViolation> compare_monotone(const SpectralField& f,
                                                         const SpectralField& g,
                                                         const SchemeSpec& scheme) {
    require_valid(f, "compare_monotone");
    require_valid(g, "compare_monotone");
    if (first_exceeding_bin(f, g, 0.0) != static_cast<std::size_t>(-1))
        throw std::invalid_argument("compare_monotone: precondition f <= g violated");
    SpectralField sf = duhamel_step(f, scheme);
    SpectralField sg = duhamel_step(g, scheme);
    std::size_t bad = first_exceeding_bin(sf, sg, 1e-12);
    if (bad == static_cast<std::size_t>(-1)) return std::nullopt;
    return MonotoneViolation{bad,
                             std::log2(sf.coeffs[bad]) + static_cast<double>(sf.exp2),
                             std::log2(sg.coeffs[bad]) + static_cast<double>(sg.exp2)};
}

enum class Termination { completed, numeric_blowup };

struct SnapshotDiag {
    double t = 0.0;
    std::int64_t exp2 = 0;
    double log2_max = 0.0;
    double log2_mass = 0.0;
    std::vector<double> besov_log2; // one entry per configured a
    std::vector<double> shell_log2; // aligned with Trajectory::shell_keys
    double origin_log2 = 0.0;
};

/// Time-indexed record of a simulation: snapshots every `stride` steps
/// plus the final state, with per-snapshot diagnostics.
struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> snapshots;
    std::vector<SnapshotDiag> diags;
    std::vector<double> a_list;
    std::vector<int> shell_keys;
    Termination termination = Termination::completed;
    double blowup_time = 0.0;
    double blowup_bits = 0.0;
};

struct SimOptions {
    std::int64_t stride = 1;
    double bit_budget = 4096.0;
    std::vector<double> a_list;
};

namespace detail {

inline std::vector<int> shell_key_range(const FrequencyGrid& grid) {
    int lo = static_cast<int>(std::ceil(std::log2(grid.dxi)));
    int hi = static_cast<int>(
        std::ceil(std::log2(grid.xi_max * std::sqrt(static_cast<double>(grid.dim)))));
    std::vector<int> keys;
    for (int k = lo; k <= hi; ++k) keys.push_back(k);
    return keys;
}

inline SnapshotDiag snapshot_diag(const SpectralField& f, double t,
                                  const std::vector<double>& a_list,
                                  const std::map<int, SpectralField>& filters,
                                  const std::vector<int>& shell_keys) {
    SnapshotDiag d;
    d.t = t;
    d.exp2 = f.exp2;
    d.log2_max = sup_log2(f).bits;
    d.log2_mass = l1_mass(f).bits;
    for (double a : a_list)
        d.besov_log2.push_back(besov_norm_with_filters(f, a, filters).norm_log2.bits);
    ShellMasses sm = shell_masses(f);
    for (int k : shell_keys) {
        auto it = sm.shells.find(k);
        d.shell_log2.push_back(it == sm.shells.end() ? ExtLog2::zero().bits : it->second.bits);
    }
    d.origin_log2 = sm.origin.bits;
    return d;
}

} // namespace detail

/// March the integrator to time T, recording diagnostics every
/// opts.stride steps. Stops early with Termination::numeric_blowup once
/// the field's magnitude exceeds opts.bit_budget bits.
inline Trajectory simulate(const SpectralField& u0, double T, const SchemeSpec& scheme,
                           const SimOptions& opts = {}) {
    if (!(T > 0.0)) throw std::invalid_argument("simulate: T must be positive");
    if (opts.stride < 1) throw std::invalid_argument("simulate: stride must be >= 1");
    require_valid(u0, "simulate");

    Trajectory traj;
    traj.a_list = opts.a_list;
    traj.shell_keys = detail::shell_key_range(u0.grid);
    std::map<int, SpectralField> filters;
    if (!opts.a_list.empty()) {
        auto [k_min, k_max] = resolvable_k_range(u0.grid);
        for (int k = k_min; k <= k_max; ++k) filters.emplace(k, make_lp_filter(k, u0.grid));
    }

    auto record = [&](const SpectralField& f, double t) {
        traj.times.push_back(t);
        traj.snapshots.push_back(f);
        traj.diags.push_back(
            detail::snapshot_diag(f, t, opts.a_list, filters, traj.shell_keys));
    };

    std::int64_t n_steps = static_cast<std::int64_t>(std::ceil(T / scheme.dt - 1e-9));
    SpectralField u = renormalize(u0);
    record(u, 0.0);
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        double t = static_cast<double>(i) * scheme.dt;
        try {
            u = duhamel_step(u, scheme);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("simulate: step " + std::to_string(i) + ": " + e.what());
        }
        double bits = total_bits(u);
        if (bits > opts.bit_budget) {
            record(u, t);
            traj.termination = Termination::numeric_blowup;
            traj.blowup_time = t;
            traj.blowup_bits = bits;
            return traj;
        }
        if (i % opts.stride == 0 || i == n_steps) record(u, t);
    }
    traj.termination = Termination::completed;
    return traj;
}

/// Result of the Picard fixed-point iteration for the mild-solution map.
struct PicardResult {
    Trajectory trajectory;              // final iterate on the step grid
    std::vector<double> residual_log2;  // sup-norm residual per iteration
    std::optional<int> overflow_iteration;
};

namespace detail {

inline double sup_absdiff_log2(const SpectralField& a, const SpectralField& b) {
    std::int64_t e = std::max(a.exp2, b.exp2);
    int sa = static_cast<int>(a.exp2 - e);
    int sb = static_cast<int>(b.exp2 - e);
    double m = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        m = std::max(m, std::abs(std::ldexp(a.coeffs[i], sa) - std::ldexp(b.coeffs[i], sb)));
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(m) + static_cast<double>(e);
}

} // namespace detail

/// Picard iteration for u = G(u) on the step grid s_j = j T/steps.
/// Iterate 0 is the heat flow of u0; each sweep applies the discrete
/// Duhamel map with the previous iterate inside the integral, using the
/// same per-step quadrature as duhamel_step. Residuals are the sup over
/// the grid (time and frequency) of |v^{m+1} - v^m|, reported in log2.
inline PicardResult picard_iterate(const SpectralField& u0, double T, int steps, int iters,
                                   double bit_budget = 4096.0) {
    if (steps < 1) throw std::invalid_argument("picard_iterate: steps must be >= 1");
    if (iters < 1) throw std::invalid_argument("picard_iterate: iters must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("picard_iterate: T must be positive");
    require_valid(u0, "picard_iterate");

    double dt = T / steps;
    SpectralField base = renormalize(u0);

    std::vector<SpectralField> cur;
    cur.reserve(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j)
        cur.push_back(heat_multiplier(base, static_cast<double>(j) * dt));

    PicardResult result;
    for (int m = 0; m < iters; ++m) {
        std::vector<SpectralField> next;
        next.reserve(cur.size());
        next.push_back(base);
        bool overflowed = false;
        for (int j = 1; j <= steps; ++j) {
            SpectralField lin = heat_multiplier(next.back(), dt);
            SpectralField nl = detail::nonlinearity(cur[static_cast<std::size_t>(j) - 1]);
            for (std::size_t i = 0; i < nl.coeffs.size(); ++i)
                nl.coeffs[i] *= detail::etd_q_weight(dt, nl.grid.xi_norm_sq(i));
            next.push_back(add_fields(lin, nl));
            if (total_bits(next.back()) > bit_budget) {
                overflowed = true;
                break;
            }
        }
        if (overflowed) {
            result.overflow_iteration = m;
            break;
        }
        double res = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < next.size(); ++j)
            res = std::max(res, detail::sup_absdiff_log2(next[j], cur[j]));
        result.residual_log2.push_back(res);
        cur = std::move(next);
    }

    Trajectory& traj = result.trajectory;
    for (int j = 0; j < static_cast<int>(cur.size()); ++j) {
        traj.times.push_back(static_cast<double>(j) * dt);
        traj.snapshots.push_back(cur[static_cast<std::size_t>(j)]);
    }
    traj.termination = Termination::completed;
    return result;
}

} // namespace cheapns
