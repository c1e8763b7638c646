#pragma once

#include <cmath>
#include <map>
#include <utility>

#include "cheapns/extlog2.hpp"
#include "cheapns/field.hpp"
#include "cheapns/profiles.hpp"

namespace cheapns {

// Fourier convention used throughout: for fields with nonnegative Fourier
// samples, ||phi_k * f||_{L_inf} is evaluated as the discrete L1 norm of
// phihat_k * fhat. The 2*pi normalization constants of the transform are
// absorbed into the norm; every quantity the library compares is built
// with the same convention, so no constant ever surfaces.

/// Littlewood-Paley block norms and the resulting B^{a,inf}_inf norm.
/// Blocks outside the grid's resolvable dyadic range are absent from the
/// map, not zero: the grid cannot witness them.
struct BesovProfile {
    double a = 0.0;
    std::map<int, ExtLog2> block_log2;
    ExtLog2 norm_log2 = ExtLog2::zero();
};

/// Dyadic indices k whose filter band both fits under xi_max and sits
/// above the grid spacing: k in [ceil(log2 dxi)+1, floor(log2 xi_max)-1].
inline std::pair<int, int> resolvable_k_range(const FrequencyGrid& grid) {
    int k_min = static_cast<int>(std::ceil(std::log2(grid.dxi))) + 1;
    int k_max = static_cast<int>(std::floor(std::log2(grid.xi_max))) - 1;
    return {k_min, k_max};
}

/// log2 of the L1 mass of filter * field (the filter has exp2 == 0).
inline ExtLog2 filtered_mass_log2(const SpectralField& filter, const SpectralField& f) {
    detail::KahanAccumulator acc;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i)
        acc.add(filter.coeffs[i] * f.coeffs[i]);
    double s = acc.value();
    if (s == 0.0) return ExtLog2::zero();
    return ExtLog2{std::log2(s) + std::log2(f.grid.cell_volume()) +
                   static_cast<double>(f.exp2)};
}

/// Homogeneous Besov norm of a nonnegative-Fourier field:
/// sup_k 2^{ak} ||phihat_k fhat||_{L1} over the resolvable blocks.
inline BesovProfile besov_norm(const SpectralField& f, double a) {
    require_valid(f, "besov_norm");
    BesovProfile out;
    out.a = a;
    auto [k_min, k_max] = resolvable_k_range(f.grid);
    for (int k = k_min; k <= k_max; ++k) {
        SpectralField filter = make_lp_filter(k, f.grid);
        ExtLog2 block = log2_scale(filtered_mass_log2(filter, f), a * k);
        out.block_log2.emplace(k, block);
        out.norm_log2 = std::max(out.norm_log2, block);
    }
    return out;
}

/// Same as besov_norm but with prebuilt filters (hot loop of simulate).
inline BesovProfile besov_norm_with_filters(const SpectralField& f, double a,
                                            const std::map<int, SpectralField>& filters) {
    BesovProfile out;
    out.a = a;
    for (const auto& [k, filter] : filters) {
        ExtLog2 block = log2_scale(filtered_mass_log2(filter, f), a * k);
        out.block_log2.emplace(k, block);
        out.norm_log2 = std::max(out.norm_log2, block);
    }
    return out;
}

/// Hard dyadic-shell masses: shell k holds the bins with
/// 2^{k-1} < |xi| <= 2^k; the origin bin is kept separately so the shell
/// family still partitions the total mass.
struct ShellMasses {
    std::map<int, ExtLog2> shells;
    ExtLog2 origin = ExtLog2::zero();
};

inline ShellMasses shell_masses(const SpectralField& f) {
    std::map<int, detail::KahanAccumulator> acc;
    detail::KahanAccumulator origin_acc;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        double c = f.coeffs[i];
        if (c == 0.0) continue;
        double r = f.grid.xi_norm(i);
        if (r == 0.0) {
            origin_acc.add(c);
            continue;
        }
        int k = static_cast<int>(std::ceil(std::log2(r)));
        acc[k].add(c);
    }
    ShellMasses out;
    double vol_log2 = std::log2(f.grid.cell_volume());
    for (auto& [k, a] : acc) {
        if (a.value() == 0.0) continue;
        out.shells.emplace(k, ExtLog2{std::log2(a.value()) + vol_log2 +
                                      static_cast<double>(f.exp2)});
    }
    if (origin_acc.value() != 0.0)
        out.origin = ExtLog2{std::log2(origin_acc.value()) + vol_log2 +
                             static_cast<double>(f.exp2)};
    return out;
}

} // namespace cheapns
