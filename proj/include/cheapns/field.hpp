#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapns/extlog2.hpp"
#include "cheapns/grid.hpp"

namespace cheapns {

namespace detail {

/// Kahan-compensated sum; deterministic and ~1 ulp accurate.
inline double kahan_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

struct KahanAccumulator {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

} // namespace detail

/// Nonnegative real samples of a Fourier transform on a grid. The value at
/// a grid point is coeffs[i] * 2^exp2; the shared exponent gives the
/// extended dynamic range the blow-up cascade needs. When `even` is set,
/// coeffs at xi and -xi are bit-identical.
struct SpectralField {
    FrequencyGrid grid;
    std::vector<double> coeffs;
    std::int64_t exp2 = 0;
    bool even = false;

    double max_coeff() const {
        double m = 0.0;
        for (double c : coeffs) m = std::max(m, c);
        return m;
    }

    bool is_zero() const {
        for (double c : coeffs)
            if (c != 0.0) return false;
        return true;
    }
};

inline SpectralField zero_field(const FrequencyGrid& grid) {
    SpectralField f;
    f.grid = grid;
    f.coeffs.assign(grid.size(), 0.0);
    return f;
}

/// Throws if any coefficient is negative or non-finite.
inline void require_valid(const SpectralField& f, const char* where) {
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        double c = f.coeffs[i];
        if (!std::isfinite(c))
            throw std::runtime_error(std::string(where) + ": non-finite coefficient at bin " +
                                     std::to_string(i));
        if (c < 0.0)
            throw std::invalid_argument(std::string(where) + ": negative coefficient at bin " +
                                        std::to_string(i));
    }
}

/// Rescale so the max coefficient lies in [1/2, 1), folding the shift into
/// exp2. Scaling is by an exact power of two, so represented values are
/// preserved bit-for-bit (up to underflow flush of far-below-max entries).
inline SpectralField renormalize(SpectralField f) {
    double m = f.max_coeff();
    if (m == 0.0) {
        f.exp2 = 0;
        return f;
    }
    int e = 0;
    std::frexp(m, &e); // m = frac * 2^e, frac in [1/2, 1)
    if (e != 0) {
        for (double& c : f.coeffs) c = std::ldexp(c, -e);
        f.exp2 += e;
    }
    return f;
}

/// log2 of the discrete L1 mass: sum of coeffs * dxi^dim * 2^exp2.
inline ExtLog2 l1_mass(const SpectralField& f) {
    double s = detail::kahan_sum(f.coeffs);
    if (s == 0.0) return ExtLog2::zero();
    return ExtLog2{std::log2(s) + std::log2(f.grid.cell_volume()) +
                   static_cast<double>(f.exp2)};
}

/// log2 of the sup of the represented field values.
inline ExtLog2 sup_log2(const SpectralField& f) {
    double m = f.max_coeff();
    if (m == 0.0) return ExtLog2::zero();
    return ExtLog2{std::log2(m) + static_cast<double>(f.exp2)};
}

/// Total magnitude in bits, the quantity the blow-up budget watches.
inline double total_bits(const SpectralField& f) { return sup_log2(f).bits; }

/// Multiply by a nonnegative scalar; the scalar's exponent goes into exp2
/// so arbitrarily large factors are safe.
inline SpectralField scale_field(SpectralField f, double factor) {
    if (!(factor >= 0.0))
        throw std::invalid_argument("scale_field: factor must be nonnegative");
    if (factor == 0.0) {
        std::fill(f.coeffs.begin(), f.coeffs.end(), 0.0);
        f.exp2 = 0;
        return f;
    }
    int e = 0;
    double frac = std::frexp(factor, &e);
    for (double& c : f.coeffs) c *= frac;
    f.exp2 += e;
    return renormalize(std::move(f));
}

/// Pointwise sum. Exponents are aligned to the larger one; contributions
/// that underflow the alignment flush to zero.
inline SpectralField add_fields(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("add_fields: grid mismatch");
    SpectralField out;
    out.grid = a.grid;
    out.even = a.even && b.even;
    out.exp2 = std::max(a.exp2, b.exp2);
    out.coeffs.resize(a.coeffs.size());
    int sa = static_cast<int>(a.exp2 - out.exp2);
    int sb = static_cast<int>(b.exp2 - out.exp2);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = std::ldexp(a.coeffs[i], sa) + std::ldexp(b.coeffs[i], sb);
    return renormalize(std::move(out));
}

/// First bin where the represented value of f exceeds that of g beyond
/// rel_tol, or npos when f <= g everywhere.
inline std::size_t first_exceeding_bin(const SpectralField& f, const SpectralField& g,
                                       double rel_tol) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("first_exceeding_bin: grid mismatch");
    std::int64_t e = std::max(f.exp2, g.exp2);
    int sf = static_cast<int>(f.exp2 - e);
    int sg = static_cast<int>(g.exp2 - e);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        double vf = std::ldexp(f.coeffs[i], sf);
        double vg = std::ldexp(g.coeffs[i], sg);
        if (vf > vg + rel_tol * std::max({vf, vg, 1e-300}))
            return i;
    }
    return static_cast<std::size_t>(-1);
}

} // namespace cheapns
