#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cheapns {

/// Base-2 logarithm of a nonnegative quantity. The value -infinity
/// represents exactly zero, so products and huge dynamic ranges stay
/// representable as plain doubles.
struct ExtLog2 {
    double bits = -std::numeric_limits<double>::infinity();

    static constexpr ExtLog2 zero() {
        return ExtLog2{-std::numeric_limits<double>::infinity()};
    }

    static ExtLog2 from_linear(double x) {
        if (!(x >= 0.0))
            throw std::invalid_argument("ExtLog2::from_linear: negative or NaN input");
        return ExtLog2{x == 0.0 ? -std::numeric_limits<double>::infinity()
                                : std::log2(x)};
    }

    bool is_zero() const { return std::isinf(bits) && bits < 0.0; }

    /// Linear-domain value; overflows to +inf past the double range.
    double linear() const { return is_zero() ? 0.0 : std::exp2(bits); }

    friend auto operator<=>(ExtLog2 a, ExtLog2 b) { return a.bits <=> b.bits; }
    friend bool operator==(ExtLog2 a, ExtLog2 b) { return a.bits == b.bits; }
};

/// log2(2^a + 2^b) without leaving the log domain.
inline ExtLog2 log2_add(ExtLog2 a, ExtLog2 b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    double hi = std::max(a.bits, b.bits);
    double lo = std::min(a.bits, b.bits);
    return ExtLog2{hi + std::log1p(std::exp2(lo - hi)) / std::numbers::ln2};
}

/// Multiply the represented quantity by 2^shift_bits.
inline ExtLog2 log2_scale(ExtLog2 a, double shift_bits) {
    if (a.is_zero()) return a;
    return ExtLog2{a.bits + shift_bits};
}

} // namespace cheapns
