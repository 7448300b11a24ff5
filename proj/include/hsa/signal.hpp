#ifndef HSA_SIGNAL_HPP
#define HSA_SIGNAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace hsa {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniformly sampled, real-valued time series. The time grid is implicit:
/// sample n sits at t0 + n / sample_rate.
class SampledSignal {
public:
    SampledSignal(std::vector<double> samples, double sample_rate, double t0 = 0.0)
        : samples_(std::move(samples)), sample_rate_(sample_rate), t0_(t0) {
        if (samples_.empty()) throw ContractError("SampledSignal: empty sample sequence");
        if (!std::isfinite(sample_rate_) || sample_rate_ <= 0.0)
            throw ContractError("SampledSignal: sample rate must be finite and positive");
        if (!std::isfinite(t0_)) throw ContractError("SampledSignal: t0 must be finite");
        for (double v : samples_)
            if (!std::isfinite(v)) throw ContractError("SampledSignal: non-finite sample");
    }

    /// Signal of `length` zeros.
    static SampledSignal zeros(std::size_t length, double sample_rate, double t0 = 0.0) {
        return SampledSignal(std::vector<double>(length, 0.0), sample_rate, t0);
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double dt() const noexcept { return 1.0 / sample_rate_; }
    [[nodiscard]] double time(double index) const noexcept { return t0_ + index / sample_rate_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Same grid, new samples.
    [[nodiscard]] SampledSignal with_samples(std::vector<double> samples) const {
        if (samples.size() != samples_.size())
            throw DimensionError("SampledSignal::with_samples: length mismatch");
        return SampledSignal(std::move(samples), sample_rate_, t0_);
    }

    [[nodiscard]] bool same_grid(const SampledSignal& other) const noexcept {
        return size() == other.size() && sample_rate_ == other.sample_rate_ && t0_ == other.t0_;
    }

private:
    std::vector<double> samples_;
    double sample_rate_;
    double t0_;
};

/// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
};

/// The central `fraction` of [0, n), e.g. 0.8 drops 10% at each end.
inline IndexRange central_range(std::size_t n, double fraction = 0.8) {
    const auto margin = static_cast<std::size_t>(std::floor(0.5 * (1.0 - fraction) * static_cast<double>(n) + 1e-9));
    return {margin, n - margin};
}

// ---------------------------------------------------------------------------
// Sequence helpers

/// Energy as the mean of squares over the full support.
inline double energy(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
}

inline double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

/// Population standard deviation.
inline double stddev(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// Removes +-2*pi jumps between consecutive samples.
inline std::vector<double> unwrap_phase(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.begin(), wrapped.end());
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double d = wrapped[i] - wrapped[i - 1];
        if (std::abs(d) > kPi) offset -= kTwoPi * std::round(d / kTwoPi);
        out[i] = wrapped[i] + offset;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Calculus

/// Second-order central differences in the interior, second-order one-sided
/// differences at the two ends. Result is per second.
inline std::vector<double> differentiate(std::span<const double> x, double sample_rate) {
    const std::size_t n = x.size();
    if (n < 3) throw ContractError("derivative: need at least 3 samples");
    std::vector<double> d(n);
    const double half_rate = 0.5 * sample_rate;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) * half_rate;
    d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) * half_rate;
    d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) * half_rate;
    return d;
}

inline SampledSignal derivative(const SampledSignal& x) {
    return x.with_samples(differentiate(x.samples(), x.sample_rate()));
}

/// Trapezoidal running integral starting at 0. Uses compensated summation so
/// long phase accumulations stay accurate to a few ulps of the result.
inline std::vector<double> integrate(std::span<const double> x, double sample_rate) {
    std::vector<double> out(x.size(), 0.0);
    const double h = 0.5 / sample_rate;
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double term = (x[i - 1] + x[i]) * h;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) comp += (sum - t) + term;
        else comp += (term - t) + sum;
        sum = t;
        out[i] = sum + comp;
    }
    return out;
}

inline SampledSignal cumulative_integral(const SampledSignal& x) {
    return x.with_samples(integrate(x.samples(), x.sample_rate()));
}

/// Centered moving average over `window` samples (odd; even values are
/// rounded down to the next odd count). Near the ends the window shrinks
/// symmetrically so it stays centered.
inline std::vector<double> moving_average(std::span<const double> x, std::size_t window) {
    std::vector<double> out(x.begin(), x.end());
    const std::size_t half = window / 2;
    if (half == 0 || x.empty()) return out;
    const std::size_t n = x.size();
    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + static_cast<long double>(x[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        const long double s = prefix[i + h + 1] - prefix[i - h];
        out[i] = static_cast<double>(s / static_cast<long double>(2 * h + 1));
    }
    return out;
}

/// Moving average with the window given in seconds.
inline SampledSignal moving_average(const SampledSignal& x, double window_seconds) {
    if (!(window_seconds >= 0.0)) throw ContractError("moving_average: negative window");
    const auto window = static_cast<std::size_t>(std::llround(window_seconds * x.sample_rate()));
    return x.with_samples(moving_average(x.samples(), window));
}

// ---------------------------------------------------------------------------
// AM-FM model

/// One latent AM-FM component a(t) exp(j theta(t)) with theta = int(omega) + phi.
/// `s` is the real projection and `sigma` the quadrature; IF is in rad/s.
struct AMFMComponent {
    std::vector<double> ia;
    std::vector<double> if_;
    double phase_ref = 0.0;
    std::vector<double> s;
    std::vector<double> sigma;
    double sample_rate = 1.0;
    double t0 = 0.0;
    /// Samples whose IA/IF are numerically singular or interpolated.
    std::vector<std::size_t> flagged;
    /// Number of samples with omega < 0 (reported, never clamped).
    std::size_t negative_if_samples = 0;

    [[nodiscard]] std::size_t size() const noexcept { return s.size(); }

    void validate() const {
        const std::size_t n = s.size();
        if (n == 0) throw ContractError("AMFMComponent: empty");
        if (ia.size() != n || if_.size() != n || sigma.size() != n)
            throw DimensionError("AMFMComponent: sequence lengths differ");
        if (!(sample_rate > 0.0)) throw ContractError("AMFMComponent: sample rate must be positive");
    }

    /// theta(t) = phi + running integral of omega.
    [[nodiscard]] std::vector<double> phase() const {
        auto theta = integrate(if_, sample_rate);
        for (double& v : theta) v += phase_ref;
        return theta;
    }

    /// a(t) cos(theta(t)), recomputed from IA/IF.
    [[nodiscard]] std::vector<double> projection() const {
        const auto theta = phase();
        std::vector<double> out(theta.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = ia[i] * std::cos(theta[i]);
        return out;
    }

    [[nodiscard]] SampledSignal real_signal() const { return SampledSignal(s, sample_rate, t0); }
};

/// Builds a component from IA, IF (rad/s) and phase reference; s and sigma are
/// a cos(theta) and a sin(theta).
inline AMFMComponent make_component(std::vector<double> ia, std::vector<double> omega, double phase_ref,
                                    double sample_rate, double t0 = 0.0) {
    if (ia.size() != omega.size()) throw DimensionError("make_component: IA and IF lengths differ");
    AMFMComponent c;
    c.ia = std::move(ia);
    c.if_ = std::move(omega);
    c.phase_ref = phase_ref;
    c.sample_rate = sample_rate;
    c.t0 = t0;
    const auto theta = c.phase();
    c.s.resize(theta.size());
    c.sigma.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        c.s[i] = c.ia[i] * std::cos(theta[i]);
        c.sigma[i] = c.ia[i] * std::sin(theta[i]);
        if (c.if_[i] < 0.0) ++c.negative_if_samples;
    }
    return c;
}

/// Ordered components (index 0 = highest frequency) plus the residual trend.
struct HilbertSpectrum {
    std::vector<AMFMComponent> components;
    SampledSignal residual;
};

/// IMFs from a decomposition, before demodulation.
struct Decomposition {
    std::vector<SampledSignal> imfs;
    SampledSignal residual;
};

/// Sum of the component real projections plus the residual.
inline SampledSignal synthesize(const HilbertSpectrum& spectrum) {
    std::vector<double> out = spectrum.residual.values();
    for (const auto& c : spectrum.components) {
        if (c.s.size() != out.size()) throw DimensionError("synthesize: component length differs from residual");
        if (c.sample_rate != spectrum.residual.sample_rate())
            throw DimensionError("synthesize: component sample rate differs from residual");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c.s[i];
    }
    return spectrum.residual.with_samples(std::move(out));
}

/// Sum of IMFs plus residual.
inline SampledSignal reconstruct(const Decomposition& d) {
    std::vector<double> out = d.residual.values();
    for (const auto& imf : d.imfs) {
        if (!imf.same_grid(d.residual)) throw DimensionError("reconstruct: IMF grid differs from residual");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += imf[i];
    }
    return d.residual.with_samples(std::move(out));
}

}  // namespace hsa

#endif  // HSA_SIGNAL_HPP
