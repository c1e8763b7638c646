#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cheapns/fft.hpp"
#include "cheapns/field.hpp"

namespace cheapns {

namespace detail {

/// Average mirrored coefficient pairs so evenness holds bit-exactly.
inline void symmetrize_even(SpectralField& f) {
    const auto& g = f.grid;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        auto o = g.offsets(i);
        std::size_t j = g.flat_index(-o[0], -o[1]);
        if (i < j) {
            double avg = 0.5 * (f.coeffs[i] + f.coeffs[j]);
            f.coeffs[i] = avg;
            f.coeffs[j] = avg;
        }
    }
}

} // namespace detail

/// Apply the heat-semigroup Fourier multiplier e^{-t|xi|^2}.
inline SpectralField heat_multiplier(const SpectralField& f, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("heat_multiplier: t must be nonnegative");
    SpectralField out = f;
    if (t > 0.0) {
        for (std::size_t i = 0; i < out.coeffs.size(); ++i)
            out.coeffs[i] *= std::exp(-t * out.grid.xi_norm_sq(i));
    }
    return renormalize(std::move(out));
}

/// Direct O(N^2) discrete convolution: (f*g)(xi) ~ sum_eta f(eta) g(xi-eta) dxi^dim.
/// Linear (non-circular); output frequencies beyond xi_max are dropped.
/// Zero bins of f are skipped, so embedding the same data in a wider grid
/// reproduces the retained coefficients bit-for-bit.
inline SpectralField convolve_direct(const SpectralField& f, const SpectralField& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("convolve_direct: grid mismatch");
    const SpectralField fa = renormalize(f);
    const SpectralField fb = renormalize(g);
    const auto& grid = f.grid;
    const int n = grid.points_per_axis();
    const int full = 2 * n - 1;
    const int h = grid.half;

    std::vector<double> acc(grid.dim == 1 ? static_cast<std::size_t>(full)
                                          : static_cast<std::size_t>(full) * full,
                            0.0);
    if (grid.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double ai = fa.coeffs[static_cast<std::size_t>(i)];
            if (ai == 0.0) continue;
            for (int j = 0; j < n; ++j)
                acc[static_cast<std::size_t>(i + j)] += ai * fb.coeffs[static_cast<std::size_t>(j)];
        }
    } else {
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1) {
                double ai = fa.coeffs[static_cast<std::size_t>(i0) * n + i1];
                if (ai == 0.0) continue;
                for (int j0 = 0; j0 < n; ++j0) {
                    std::size_t row = static_cast<std::size_t>(i0 + j0) * full + i1;
                    std::size_t grow = static_cast<std::size_t>(j0) * n;
                    for (int j1 = 0; j1 < n; ++j1)
                        acc[row + j1] += ai * fb.coeffs[grow + j1];
                }
            }
    }

    SpectralField out = zero_field(grid);
    out.even = f.even && g.even;
    out.exp2 = fa.exp2 + fb.exp2;
    const double scale = grid.cell_volume();
    if (grid.dim == 1) {
        for (int o = -h; o <= h; ++o)
            out.coeffs[grid.flat_index(o)] = acc[static_cast<std::size_t>(o + 2 * h)] * scale;
    } else {
        for (int o0 = -h; o0 <= h; ++o0)
            for (int o1 = -h; o1 <= h; ++o1)
                out.coeffs[grid.flat_index(o0, o1)] =
                    acc[static_cast<std::size_t>(o0 + 2 * h) * full + (o1 + 2 * h)] * scale;
    }
    if (out.even) detail::symmetrize_even(out);
    return renormalize(std::move(out));
}

/// FFT-accelerated convolution with zero padding >= 2x per axis. A second
/// pass convolves support indicators; the resulting integer pair counts
/// identify the exact Minkowski-sum support, outside of which the output
/// is forced to exact zero (inside, FFT roundoff below zero is clamped).
inline SpectralField convolve_fft(const SpectralField& f, const SpectralField& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("convolve_fft: grid mismatch");
    const bool self = &f == &g;
    const SpectralField fa = renormalize(f);
    const SpectralField fb = self ? fa : renormalize(g);
    const auto& grid = f.grid;
    const int n = grid.points_per_axis();
    const int h = grid.half;
    const int full = 2 * n - 1;

    auto values = self ? detail::fft_linear_convolution(fa.coeffs, fa.coeffs, n, grid.dim)
                       : detail::fft_linear_convolution(fa.coeffs, fb.coeffs, n, grid.dim);

    std::vector<double> ind_a(fa.coeffs.size());
    for (std::size_t i = 0; i < ind_a.size(); ++i) ind_a[i] = fa.coeffs[i] > 0.0 ? 1.0 : 0.0;
    std::vector<double> ind_b;
    if (!self) {
        ind_b.resize(fb.coeffs.size());
        for (std::size_t i = 0; i < ind_b.size(); ++i) ind_b[i] = fb.coeffs[i] > 0.0 ? 1.0 : 0.0;
    }
    auto counts = self ? detail::fft_linear_convolution(ind_a, ind_a, n, grid.dim)
                       : detail::fft_linear_convolution(ind_a, ind_b, n, grid.dim);

    SpectralField out = zero_field(grid);
    out.even = f.even && g.even;
    out.exp2 = fa.exp2 + fb.exp2;
    const double scale = grid.cell_volume();
    auto emit = [&](std::size_t dst, std::size_t src) {
        if (counts[src] > 0.5)
            out.coeffs[dst] = std::max(0.0, values[src] * scale);
    };
    if (grid.dim == 1) {
        for (int o = -h; o <= h; ++o)
            emit(grid.flat_index(o), static_cast<std::size_t>(o + 2 * h));
    } else {
        for (int o0 = -h; o0 <= h; ++o0)
            for (int o1 = -h; o1 <= h; ++o1)
                emit(grid.flat_index(o0, o1),
                     static_cast<std::size_t>(o0 + 2 * h) * full + (o1 + 2 * h));
    }
    if (out.even) detail::symmetrize_even(out);
    return renormalize(std::move(out));
}

/// Discrete convolution; picks the FFT path for grids where it pays off.
inline SpectralField convolve(const SpectralField& f, const SpectralField& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("convolve: grid mismatch");
    return f.grid.size() >= 128 ? convolve_fft(f, g) : convolve_direct(f, g);
}

} // namespace cheapns
