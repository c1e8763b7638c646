#pragma once

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <vector>

#include <fftw3.h>

namespace cheapns::detail {

inline int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}

/// One cached FFTW plan pair (r2c forward, c2r backward) with owned
/// buffers. Data is copied through the buffers so new-array alignment is
/// never an issue, and FFTW_ESTIMATE keeps planning deterministic.
class ConvPlan {
  public:
    ConvPlan(int n0, int n1) : n0_(n0), n1_(n1) {
        int real_len = n0_ * n1_;
        int cplx_len = n0_ * (n1_ / 2 + 1);
        rbuf_.resize(static_cast<std::size_t>(real_len));
        cbuf_.resize(static_cast<std::size_t>(cplx_len));
        auto* r = rbuf_.data();
        auto* c = reinterpret_cast<fftw_complex*>(cbuf_.data());
        if (n0_ == 1) {
            fwd_ = fftw_plan_dft_r2c_1d(n1_, r, c, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_1d(n1_, c, r, FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_r2c_2d(n0_, n1_, r, c, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_2d(n0_, n1_, c, r, FFTW_ESTIMATE);
        }
    }

    ~ConvPlan() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    ConvPlan(const ConvPlan&) = delete;
    ConvPlan& operator=(const ConvPlan&) = delete;

    std::vector<std::complex<double>> forward(const std::vector<double>& padded) {
        std::memcpy(rbuf_.data(), padded.data(), padded.size() * sizeof(double));
        fftw_execute(fwd_);
        return cbuf_;
    }

    /// Inverse transform of the given spectrum, normalized by the grid size.
    std::vector<double> backward(const std::vector<std::complex<double>>& spec) {
        std::memcpy(cbuf_.data(), spec.data(), spec.size() * sizeof(std::complex<double>));
        fftw_execute(bwd_);
        std::vector<double> out = rbuf_;
        double inv = 1.0 / (static_cast<double>(n0_) * static_cast<double>(n1_));
        for (double& v : out) v *= inv;
        return out;
    }

  private:
    int n0_, n1_;
    std::vector<double> rbuf_;
    std::vector<std::complex<double>> cbuf_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

inline ConvPlan& plan_for(int n0, int n1) {
    static std::map<std::pair<int, int>, std::unique_ptr<ConvPlan>> cache;
    auto& slot = cache[{n0, n1}];
    if (!slot) slot = std::make_unique<ConvPlan>(n0, n1);
    return *slot;
}

/// Full linear convolution of two arrays sampled on n points per axis
/// (dim = 1 or 2, row-major), via zero-padded FFT. The result covers
/// 2n-1 points per axis, also row-major.
inline std::vector<double> fft_linear_convolution(const std::vector<double>& a,
                                                  const std::vector<double>& b, int n,
                                                  int dim) {
    int full = 2 * n - 1;
    int pad = next_pow2(full);
    int p0 = dim == 1 ? 1 : pad;
    int p1 = pad;
    auto& plan = plan_for(p0, p1);

    auto embed = [&](const std::vector<double>& src) {
        std::vector<double> dst(static_cast<std::size_t>(p0) * p1, 0.0);
        if (dim == 1) {
            std::memcpy(dst.data(), src.data(), static_cast<std::size_t>(n) * sizeof(double));
        } else {
            for (int r = 0; r < n; ++r)
                std::memcpy(dst.data() + static_cast<std::size_t>(r) * p1,
                            src.data() + static_cast<std::size_t>(r) * n,
                            static_cast<std::size_t>(n) * sizeof(double));
        }
        return dst;
    };

    bool self = &a == &b;
    auto sa = plan.forward(embed(a));
    auto sb = self ? sa : plan.forward(embed(b));
    for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
    auto padded = plan.backward(sa);

    if (dim == 1) {
        padded.resize(static_cast<std::size_t>(full));
        return padded;
    }
    std::vector<double> out(static_cast<std::size_t>(full) * full);
    for (int r = 0; r < full; ++r)
        std::memcpy(out.data() + static_cast<std::size_t>(r) * full,
                    padded.data() + static_cast<std::size_t>(r) * p1,
                    static_cast<std::size_t>(full) * sizeof(double));
    return out;
}

} // namespace cheapns::detail
