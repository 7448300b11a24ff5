#ifndef HSA_STFT_HPP
#define HSA_STFT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "parallel.hpp"
#include "signal.hpp"

namespace hsa {

enum class WindowKind { hamming };

struct STFTParams {
    std::size_t window_length = 1024;
    std::size_t hop = 16;
    WindowKind window_kind = WindowKind::hamming;

    void validate() const {
        if (window_length < 2) throw ContractError("STFTParams: window_length must be >= 2");
        if (hop < 1) throw ContractError("STFTParams: hop must be >= 1");
    }
};

/// Symmetric window of length n.
inline std::vector<double> make_window(WindowKind kind, std::size_t n) {
    std::vector<double> w(n);
    switch (kind) {
        case WindowKind::hamming:
            for (std::size_t i = 0; i < n; ++i)
                w[i] = 0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
            break;
    }
    return w;
}

struct STFTGrid {
    /// Frame centres in seconds.
    std::vector<double> times;
    /// Bin frequencies in Hz, 0 .. fs/2.
    std::vector<double> frequencies_hz;
    /// magnitude[frame][bin]
    std::vector<std::vector<double>> magnitude;
};

/// Magnitudes of the one-sided DFT of each windowed frame. Frames start every
/// `hop` samples and are kept only while they fit inside the signal.
inline STFTGrid stft_magnitude(const SampledSignal& x, const STFTParams& p = {}) {
    p.validate();
    const std::size_t n = x.size();
    const std::size_t len = p.window_length;
    if (n < len) throw ContractError("stft_magnitude: signal shorter than the window");
    const auto window = make_window(p.window_kind, len);
    const std::size_t frames = (n - len) / p.hop + 1;
    const std::size_t bins = len / 2 + 1;

    STFTGrid g;
    g.frequencies_hz.resize(bins);
    for (std::size_t k = 0; k < bins; ++k)
        g.frequencies_hz[k] = static_cast<double>(k) * x.sample_rate() / static_cast<double>(len);
    g.times.resize(frames);
    g.magnitude.assign(frames, std::vector<double>(bins));

    const auto samples = x.samples();
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * p.hop;
        g.times[f] = x.t0() + (static_cast<double>(start) + 0.5 * static_cast<double>(len - 1)) / x.sample_rate();
    }
    // One plan per block of frames; a plan's buffers cannot be shared between threads.
    const std::size_t blocks = std::min<std::size_t>(frames, 64);
    parallel_for(blocks, [&](std::size_t b) {
        fft::RealForward plan(len);
        std::vector<double> frame(len);
        std::vector<std::complex<double>> spec;
        for (std::size_t f = b * frames / blocks; f < (b + 1) * frames / blocks; ++f) {
            const std::size_t start = f * p.hop;
            for (std::size_t i = 0; i < len; ++i) frame[i] = samples[start + i] * window[i];
            plan(frame, spec);
            for (std::size_t k = 0; k < bins; ++k) g.magnitude[f][k] = std::abs(spec[k]);
        }
    });
    return g;
}

}  // namespace hsa

#endif  // HSA_STFT_HPP
