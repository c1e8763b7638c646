#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "cheapns/field.hpp"
#include "cheapns/ops.hpp"

namespace cheapns {

namespace detail {

/// C^2 radial bump: (1 - r^2)^2 inside the unit ball, 0 outside.
inline double poly2_bump(double r) {
    if (r >= 1.0) return 0.0;
    double q = 1.0 - r * r;
    return q * q;
}

/// Reflect a field through the origin (exact index mirror).
inline SpectralField mirrored(const SpectralField& f) {
    SpectralField out = zero_field(f.grid);
    out.exp2 = f.exp2;
    out.even = f.even;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        auto o = f.grid.offsets(i);
        out.coeffs[f.grid.flat_index(-o[0], -o[1])] = f.coeffs[i];
    }
    return out;
}

/// Scale coefficients so the discrete L1 mass equals `target`.
inline SpectralField normalize_mass(SpectralField f, double target) {
    double raw = kahan_sum(f.coeffs) * f.grid.cell_volume();
    if (!(raw > 0.0))
        throw std::invalid_argument("normalize_mass: profile has no mass on this grid");
    double c = target / raw;
    for (double& v : f.coeffs) v *= c;
    return renormalize(std::move(f));
}

} // namespace detail

/// Bump profile with the two-ball support B_{1/4}(3 e1/4) u B_{1/4}(-3 e1/4)
/// and discrete L1 mass 2. Even by construction (positive-side bump plus its
/// exact mirror image).
inline SpectralField make_w(const FrequencyGrid& grid) {
    if (grid.dxi > 1.0 / 16.0 + 1e-15)
        throw std::invalid_argument("make_w: dxi must be <= 1/16 to resolve the bumps");
    const double center = 0.75;
    const double radius = 0.25;
    SpectralField pos = zero_field(grid);
    pos.even = false;
    for (std::size_t i = 0; i < pos.coeffs.size(); ++i) {
        auto o = grid.offsets(i);
        double d0 = o[0] * grid.dxi - center;
        double d1 = o[1] * grid.dxi;
        double r = std::sqrt(d0 * d0 + d1 * d1) / radius;
        pos.coeffs[i] = detail::poly2_bump(r);
    }
    SpectralField w = add_fields(pos, detail::mirrored(pos));
    w.even = true;
    return detail::normalize_mass(std::move(w), 2.0);
}

/// Restriction of w to the positive ball B_{1/4}(3 e1/4); mass 1.
inline SpectralField make_w0(const SpectralField& w) {
    SpectralField out = w;
    out.even = false;
    const double center = 0.75;
    const double radius = 0.25;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
        auto o = out.grid.offsets(i);
        double d0 = o[0] * out.grid.dxi - center;
        double d1 = o[1] * out.grid.dxi;
        if (d0 * d0 + d1 * d1 > radius * radius) out.coeffs[i] = 0.0;
    }
    return renormalize(std::move(out));
}

/// k-th cascade profile: w_0 self-convolved k times by recursive doubling.
/// Mass stays 1 up to roundoff; support lies in the dyadic shell
/// {2^{k-1} <= |xi| <= 2^k} on the positive e1 side.
inline SpectralField make_wk(int k, const FrequencyGrid& grid) {
    if (k < 0) throw std::invalid_argument("make_wk: k must be nonnegative");
    if (grid.xi_max < std::ldexp(1.0, k))
        throw std::invalid_argument("make_wk: xi_max < 2^" + std::to_string(k) +
                                    " would truncate the profile support");
    SpectralField f = make_w0(make_w(grid));
    for (int i = 1; i <= k; ++i) f = convolve(f, f);
    return f;
}

/// Littlewood-Paley generator: Phi(r) = h(r) - h(2r) with h a monotone
/// C^2 step, so Phi is supported in [1/2, 2], takes values in [0, 1], and
/// sum_k Phi(2^{-k} r) telescopes to exactly 1 for every r > 0.
inline double lp_phi(double r) {
    auto h = [](double x) {
        if (x <= 1.0) return 1.0;
        if (x >= 2.0) return 0.0;
        double s = x - 1.0;
        return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    };
    return h(r) - h(2.0 * r);
}

/// Grid samples of the k-th dyadic filter phi_k(xi) = Phi(2^{-k}|xi|).
inline SpectralField make_lp_filter(int k, const FrequencyGrid& grid) {
    if (grid.xi_max < std::ldexp(1.0, k + 1))
        throw std::invalid_argument("make_lp_filter: filter band 2^" + std::to_string(k + 1) +
                                    " exceeds xi_max");
    SpectralField out = zero_field(grid);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = lp_phi(std::ldexp(grid.xi_norm(i), -k));
    out.even = true;
    return out;
}

/// Radial annulus bump supported in B_1(0) \ B_{1/2}(0), normalized to
/// mass 2; the profile behind the non-existence initial datum.
inline SpectralField make_annulus_profile(const FrequencyGrid& grid) {
    if (grid.dxi > 1.0 / 16.0 + 1e-15)
        throw std::invalid_argument("make_annulus_profile: dxi must be <= 1/16");
    SpectralField f = zero_field(grid);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        double r = (grid.xi_norm(i) - 0.75) / 0.25;
        f.coeffs[i] = detail::poly2_bump(std::abs(r));
    }
    f.even = true;
    return detail::normalize_mass(std::move(f), 2.0);
}

/// Truncated non-existence datum: sum_{k=1}^{K} 2^{k-1}
/// [what(xi + (2^k-1)e1) + what(xi - (2^k-1)e1)] with the annulus profile.
inline SpectralField make_v(int K, const FrequencyGrid& grid) {
    if (K < 1) throw std::invalid_argument("make_v: K must be >= 1");
    if (grid.xi_max < std::ldexp(1.0, K))
        throw std::invalid_argument("make_v: xi_max < 2^" + std::to_string(K) +
                                    " would truncate a shifted copy");
    SpectralField prof = make_annulus_profile(grid);
    SpectralField out = zero_field(grid);
    for (int k = 1; k <= K; ++k) {
        double shift = std::ldexp(1.0, k) - 1.0;
        double bins = shift / grid.dxi;
        double rounded = std::round(bins);
        if (std::abs(bins - rounded) > 1e-9)
            throw std::invalid_argument("make_v: shift " + std::to_string(shift) +
                                        " is not a whole number of grid bins");
        int s = static_cast<int>(rounded);
        double weight = std::ldexp(1.0, k - 1);
        for (std::size_t i = 0; i < prof.coeffs.size(); ++i) {
            if (prof.coeffs[i] == 0.0) continue;
            auto o = grid.offsets(i);
            for (int sign : {+1, -1}) {
                int o0 = o[0] + sign * s;
                if (!grid.in_range(o0, o[1]))
                    throw std::invalid_argument("make_v: shifted copy leaves the grid");
                out.coeffs[grid.flat_index(o0, o[1])] += weight * prof.coeffs[i];
            }
        }
    }
    out.exp2 = prof.exp2;
    out.even = true;
    return renormalize(std::move(out));
}

/// Profile lookup for the CLI: "w", "w0", "wk:<k>", "lp:<k>", "v:<K>".
inline SpectralField make_profile_by_name(const std::string& name, const FrequencyGrid& grid) {
    if (name == "w") return make_w(grid);
    if (name == "w0") return make_w0(make_w(grid));
    auto split = name.find(':');
    if (split != std::string::npos) {
        std::string kind = name.substr(0, split);
        int arg = std::stoi(name.substr(split + 1));
        if (kind == "wk") return make_wk(arg, grid);
        if (kind == "lp") return make_lp_filter(arg, grid);
        if (kind == "v") return make_v(arg, grid);
    }
    throw std::invalid_argument("unknown profile name: " + name);
}

} // namespace cheapns
