#ifndef HSA_FFT_HPP
#define HSA_FFT_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "errors.hpp"

namespace hsa::fft {

namespace detail {

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <typename T>
struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)))), size(n) {
        if (!data) throw NumericError("fft: allocation failed");
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    T* data;
    std::size_t size;
};

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {
        if (!plan_) throw NumericError("fft: planning failed");
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

}  // namespace detail

/// Complex DFT. `inverse` computes the unnormalized backward transform
/// divided by n, so ifft(fft(x)) == x.
inline std::vector<std::complex<double>> transform(std::span<const std::complex<double>> x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    detail::FftwBuffer<fftw_complex> in(n), out(n);
    std::unique_ptr<detail::Plan> plan;
    {
        std::lock_guard lock(detail::planner_mutex());
        plan = std::make_unique<detail::Plan>(fftw_plan_dft_1d(static_cast<int>(n), in.data, out.data,
                                                               inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE));
    }
    for (std::size_t i = 0; i < n; ++i) {
        in.data[i][0] = x[i].real();
        in.data[i][1] = x[i].imag();
    }
    plan->execute();
    std::vector<std::complex<double>> y(n);
    const double scale = inverse ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i) y[i] = {out.data[i][0] * scale, out.data[i][1] * scale};
    return y;
}

inline std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) { return transform(x, false); }
inline std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> x) { return transform(x, true); }

/// Reusable real-to-complex transform of a fixed length; returns n/2 + 1 bins.
class RealForward {
public:
    explicit RealForward(std::size_t n) : n_(n), in_(n), out_(n / 2 + 1) {
        if (n == 0) throw ContractError("fft: zero length");
        std::lock_guard lock(detail::planner_mutex());
        plan_ = std::make_unique<detail::Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.data, out_.data, FFTW_ESTIMATE));
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    void operator()(std::span<const double> x, std::vector<std::complex<double>>& bins) {
        if (x.size() != n_) throw DimensionError("fft: input length differs from plan length");
        std::copy(x.begin(), x.end(), in_.data);
        plan_->execute();
        bins.resize(n_ / 2 + 1);
        for (std::size_t i = 0; i < bins.size(); ++i) bins[i] = {out_.data[i][0], out_.data[i][1]};
    }

private:
    std::size_t n_;
    detail::FftwBuffer<double> in_;
    detail::FftwBuffer<fftw_complex> out_;
    std::unique_ptr<detail::Plan> plan_;
};

}  // namespace hsa::fft

#endif  // HSA_FFT_HPP
