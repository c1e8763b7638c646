#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapns/besov.hpp"
#include "cheapns/extlog2.hpp"
#include "cheapns/field.hpp"
#include "cheapns/profiles.hpp"

namespace cheapns {

// All cascade bookkeeping is done in the log2 domain with plain doubles;
// the quantities involved are products of powers of 2 and e, so the
// exponents stay well inside double range for stages k <= 64.

/// Cascade stage times t_k = ln2 * (1 - 4^{-k}) / 3, limit ln2 / 3.
inline double t_infinity() { return std::numbers::ln2 / 3.0; }

inline double t_k(int k) {
    if (k < 0) throw std::invalid_argument("t_k: k must be nonnegative");
    return std::numbers::ln2 * (1.0 - std::ldexp(1.0, -2 * k)) / 3.0;
}

/// log2 of the stage coefficient alpha_k(t) = 2^{k-4(2^k-1)} e^{-2^k t}
/// for t >= t_k; exactly zero (log2 = -inf) before the stage activates.
inline ExtLog2 alpha_log2(int k, double t) {
    if (k < 0) throw std::invalid_argument("alpha_log2: k must be nonnegative");
    if (!(t >= 0.0)) throw std::invalid_argument("alpha_log2: t must be nonnegative");
    if (t < t_k(k)) return ExtLog2::zero();
    double p = std::ldexp(1.0, k);
    return ExtLog2{static_cast<double>(k) - 4.0 * (p - 1.0) - p * t / std::numbers::ln2};
}

/// Validity margin of the k-th induction step expressed through the time
/// gap from the previous stage: log2(2 (1 - e^{-4^k gap})). Nonnegative
/// iff gap >= 4^{-k} ln2, i.e. iff t >= t_k.
inline double step_margin_from_gap(int k, double gap) {
    if (k < 1) throw std::invalid_argument("step_margin_from_gap: k must be >= 1");
    double x = std::ldexp(gap, 2 * k); // 4^k * gap, exact scaling
    return 1.0 + std::log2(-std::expm1(-x));
}

/// Margin at the stage's own activation time t = t_k. The gap t_k - t_{k-1}
/// equals 4^{-k} ln2 in closed form, which avoids the catastrophic
/// cancellation a direct subtraction of nearly equal times would cause.
inline double step_margin_at_stage_time(int k) {
    return step_margin_from_gap(k, std::ldexp(std::numbers::ln2, -2 * k));
}

/// Margin at the blow-up time t_inf; the gap t_inf - t_{k-1} equals
/// t_inf * 4^{1-k} in closed form.
inline double step_margin_at_blowup_time(int k) {
    return step_margin_from_gap(k, std::ldexp(t_infinity(), -2 * (k - 1)));
}

/// The scalar identity behind the induction step's constant chase:
/// 2^{k-1} * (2^{(k-1)-4(2^{k-1}-1)})^2 == 2^{k-4(2^k-1)} * 2^{1+2k},
/// checked exactly on integer exponents.
inline bool exponent_bookkeeping_ok(int k) {
    if (k < 1 || k > 64) return false;
    __int128 p_prev = static_cast<__int128>(1) << (k - 1);
    __int128 p = static_cast<__int128>(1) << k;
    __int128 lhs = (k - 1) + 2 * ((k - 1) - 4 * (p_prev - 1));
    __int128 rhs = (k - 4 * (p - 1)) + (1 + 2 * k);
    return lhs == rhs;
}

/// Replay the k-th induction step at time t: asserts the exponent
/// bookkeeping and returns the step margin in bits (valid iff >= 0).
/// The canonical times t_inf and t_k are detected bit-exactly and routed
/// through the cancellation-free gap formulas.
inline double verify_inductive_step(int k, double t) {
    if (k < 1) throw std::invalid_argument("verify_inductive_step: k must be >= 1");
    if (t < t_k(k))
        throw std::invalid_argument("verify_inductive_step: t < t_k, stage not active");
    if (!exponent_bookkeeping_ok(k))
        throw std::logic_error("verify_inductive_step: exponent bookkeeping failed");
    if (t == t_infinity()) return step_margin_at_blowup_time(k);
    if (t == t_k(k)) return step_margin_at_stage_time(k);
    return step_margin_from_gap(k, t - t_k(k - 1));
}

/// Slope of the Besov lower bound's 2^k coefficient; the bound diverges
/// in k exactly when this is positive.
inline double asymptotic_slope(double A_log2, double t) {
    return A_log2 - (4.0 + t / std::numbers::ln2);
}

/// log2 of the blow-up threshold amplitude 2^4 e^{t_inf} = 2^{13/3}.
inline double blowup_threshold_log2() { return 4.0 + t_infinity() / std::numbers::ln2; }

/// Stage-k lower bound on the Besov norm, in bits:
/// 2^k A_log2 + (a+1)k - 4(2^k - 1) - 2^k t / ln2, grouped so that the
/// 2^k coefficient cancels exactly at the threshold amplitude.
inline double besov_lower_bound_log2(double A_log2, double a, int k, double t) {
    if (k < 0) throw std::invalid_argument("besov_lower_bound_log2: k must be >= 0");
    return std::ldexp(asymptotic_slope(A_log2, t), k) + (a + 1.0) * k + 4.0;
}

enum class Verdict { diverges, below_threshold };

inline const char* to_string(Verdict v) {
    return v == Verdict::diverges ? "diverges" : "below_threshold";
}

/// Amplitude classification from the sign of the asymptotic slope at the
/// blow-up time (not from a hard-coded constant; tests cross-check the
/// slope against the literal 13/3).
inline Verdict classify(double A_log2, [[maybe_unused]] double a) {
    return asymptotic_slope(A_log2, t_infinity()) > 0.0 ? Verdict::diverges
                                                        : Verdict::below_threshold;
}

/// Per-stage record of the induction replay.
struct CascadeStage {
    int k = 0;
    double t_k = 0.0;
    ExtLog2 alpha_log2 = ExtLog2::zero();
    double step_margin_bits = 0.0;
    double besov_lb_log2 = 0.0;
};

struct CascadeCertificate {
    double A_log2 = 0.0;
    double a = 0.0;
    double t = 0.0;
    std::vector<CascadeStage> stages;
    Verdict verdict = Verdict::below_threshold;
    std::optional<int> failed_stage; // first stage whose margin is negative
};

/// Assemble the full cascade certificate at evaluation time t (stage 0 is
/// the heat bound and carries margin 0 by definition).
inline CascadeCertificate build_certificate(double A_log2, double a, int k_max, double t) {
    if (k_max < 0) throw std::invalid_argument("build_certificate: k_max must be >= 0");
    CascadeCertificate cert;
    cert.A_log2 = A_log2;
    cert.a = a;
    cert.t = t;
    cert.verdict = classify(A_log2, a);
    for (int k = 0; k <= k_max; ++k) {
        CascadeStage st;
        st.k = k;
        st.t_k = t_k(k);
        st.alpha_log2 = alpha_log2(k, t);
        if (k == 0) {
            st.step_margin_bits = 0.0;
        } else if (t < t_k(k)) {
            st.step_margin_bits = -std::numeric_limits<double>::infinity();
        } else {
            st.step_margin_bits = verify_inductive_step(k, t);
        }
        st.besov_lb_log2 = besov_lower_bound_log2(A_log2, a, k, t);
        if (st.step_margin_bits < 0.0 && !cert.failed_stage) cert.failed_stage = k;
        cert.stages.push_back(st);
    }
    return cert;
}

/// Grid-level domination margin: min over the support of w_k of
/// log2 f - log2(A^{2^k} alpha_k(t) w_k), in bits. Nonnegative margin
/// certifies that the field dominates the stage-k analytic lower bound.
inline double check_field_dominates(const SpectralField& f, int k, double A_log2, double t) {
    if (f.grid.xi_max < std::ldexp(1.0, k))
        throw std::invalid_argument("check_field_dominates: w_" + std::to_string(k) +
                                    " support exceeds the grid");
    if (t < t_k(k))
        throw std::invalid_argument("check_field_dominates: t < t_k");
    SpectralField wk = make_wk(k, f.grid);
    double amp = std::ldexp(A_log2, k) + alpha_log2(k, t).bits;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < wk.coeffs.size(); ++i) {
        if (wk.coeffs[i] == 0.0) continue;
        double rhs = amp + std::log2(wk.coeffs[i]) + static_cast<double>(wk.exp2);
        double lhs = f.coeffs[i] > 0.0
                         ? std::log2(f.coeffs[i]) + static_cast<double>(f.exp2)
                         : -std::numeric_limits<double>::infinity();
        margin = std::min(margin, lhs - rhs);
    }
    return margin;
}

/// Partial sum S_K(t) of the non-existence series
/// sum_k 2^{2k-1}/(2^{2k+1}-4) e^{-4t} (1 - e^{(4-2^{2k+1})t}).
inline double noexist_partial_sum(int K, double t) {
    if (K < 1) throw std::invalid_argument("noexist_partial_sum: K must be >= 1");
    if (!(t > 0.0))
        throw std::invalid_argument("noexist_partial_sum: t must be positive (the series "
                                    "degenerates at t = 0)");
    double decay = std::exp(-4.0 * t);
    detail::KahanAccumulator acc;
    for (int k = 1; k <= K; ++k) {
        // 2^{2k-1}/(2^{2k+1}-4) = (1/4) / (1 - 2^{1-2k}), stable for all k.
        double ratio = 0.25 / (1.0 - std::ldexp(1.0, 1 - 2 * k));
        double bracket = -std::expm1((4.0 - std::ldexp(1.0, 2 * k + 1)) * t);
        acc.add(ratio * decay * bracket);
    }
    return acc.value();
}

/// The Duhamel lower bound field S_K(t) * (what * what) built from the
/// annulus profile, with the scalar recorded alongside.
struct NoexistBound {
    SpectralField field;
    double partial_sum = 0.0;
    double profile_mass_log2 = 0.0;
};

inline NoexistBound first_iterate_lower_bound(const FrequencyGrid& grid, int K, double t) {
    NoexistBound out;
    out.partial_sum = noexist_partial_sum(K, t);
    SpectralField prof = make_annulus_profile(grid);
    out.profile_mass_log2 = l1_mass(prof).bits;
    out.field = scale_field(convolve(prof, prof), out.partial_sum);
    return out;
}

} // namespace cheapns
