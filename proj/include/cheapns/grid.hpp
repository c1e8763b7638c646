#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

namespace cheapns {

/// Symmetric uniform sampling of frequency space. Sample points are the
/// integer multiples of dxi in [-xi_max, xi_max]^dim, origin included,
/// so the point count per axis is odd.
struct FrequencyGrid {
    int dim = 1;        // 1 or 2
    double dxi = 1.0;   // spacing per frequency axis
    double xi_max = 1.0;
    int half = 1;       // xi_max / dxi, points per axis = 2*half + 1

    int points_per_axis() const { return 2 * half + 1; }

    std::size_t size() const {
        std::size_t n = static_cast<std::size_t>(points_per_axis());
        return dim == 1 ? n : n * n;
    }

    /// Cell volume of the frequency-space Riemann sum.
    double cell_volume() const { return dim == 1 ? dxi : dxi * dxi; }

    /// Per-axis signed offsets (in units of dxi) of a flat row-major index.
    std::array<int, 2> offsets(std::size_t flat) const {
        if (dim == 1) return {static_cast<int>(flat) - half, 0};
        int n = points_per_axis();
        int a = static_cast<int>(flat / static_cast<std::size_t>(n)) - half;
        int b = static_cast<int>(flat % static_cast<std::size_t>(n)) - half;
        return {a, b};
    }

    std::size_t flat_index(int o0, int o1 = 0) const {
        if (dim == 1) return static_cast<std::size_t>(o0 + half);
        std::size_t n = static_cast<std::size_t>(points_per_axis());
        return static_cast<std::size_t>(o0 + half) * n +
               static_cast<std::size_t>(o1 + half);
    }

    bool in_range(int o0, int o1 = 0) const {
        return o0 >= -half && o0 <= half && o1 >= -half && o1 <= half;
    }

    /// |xi|^2 at a flat index. Exact for dyadic dxi and modest offsets.
    double xi_norm_sq(std::size_t flat) const {
        auto o = offsets(flat);
        double x0 = o[0] * dxi;
        double x1 = o[1] * dxi;
        return x0 * x0 + x1 * x1;
    }

    double xi_norm(std::size_t flat) const { return std::sqrt(xi_norm_sq(flat)); }

    /// Coordinate along the first axis (the paper's cascade axis).
    double xi_axis0(std::size_t flat) const { return offsets(flat)[0] * dxi; }

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
        return a.dim == b.dim && a.dxi == b.dxi && a.xi_max == b.xi_max;
    }
};

/// Build a grid, rejecting non-integral xi_max/dxi.
inline FrequencyGrid make_grid(int dim, double dxi, double xi_max) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("make_grid: dim must be 1 or 2");
    if (!(dxi > 0.0) || !(xi_max > 0.0))
        throw std::invalid_argument("make_grid: dxi and xi_max must be positive");
    double ratio = xi_max / dxi;
    double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "make_grid: xi_max (" << xi_max << ") is not an integer multiple of dxi ("
            << dxi << ")";
        throw std::invalid_argument(msg.str());
    }
    FrequencyGrid g;
    g.dim = dim;
    g.dxi = dxi;
    g.xi_max = xi_max;
    g.half = static_cast<int>(rounded);
    return g;
}

} // namespace cheapns
