#ifndef HSA_ORACLES_HPP
#define HSA_ORACLES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "bessel.hpp"
#include "errors.hpp"
#include "signal.hpp"

namespace hsa {

/// Uniform sampling grid: `length` samples at `sample_rate` starting at t0.
struct TimeGrid {
    double sample_rate = 8000.0;
    std::size_t length = 8000;
    double t0 = 0.0;

    [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) / sample_rate; }

    static TimeGrid seconds(double sample_rate, double duration, double t0 = 0.0) {
        return {sample_rate, static_cast<std::size_t>(std::llround(duration * sample_rate)), t0};
    }
};

template <typename F>
SampledSignal sample(const TimeGrid& grid, F&& f) {
    std::vector<double> x(grid.length);
    for (std::size_t i = 0; i < grid.length; ++i) x[i] = f(grid.time(i));
    return SampledSignal(std::move(x), grid.sample_rate, grid.t0);
}

// ---------------------------------------------------------------------------
// Triangle waveform

/// Even-symmetric triangle of amplitude A and fundamental omega0 (rad/s).
struct TriangleParams {
    double amplitude = 1.0;
    double omega0 = 50.0 * kPi;

    [[nodiscard]] double period() const { return kTwoPi / omega0; }

    void validate() const {
        if (!(amplitude > 0.0 && omega0 > 0.0)) throw ContractError("TriangleParams: A and omega0 must be positive");
    }

    /// x(t) = A - 2 A omega0 |tau| / pi with tau the time wrapped to [-T/2, T/2].
    [[nodiscard]] double value(double t) const {
        const double T = period();
        const double tau = t - T * std::round(t / T);
        return amplitude - 2.0 * amplitude * omega0 * std::abs(tau) / kPi;
    }

    /// Unwrapped phase of the constant-IA solution: arccos(x/A) on falling
    /// half-periods, 2 pi - arccos(x/A) on rising ones, plus 2 pi per period.
    [[nodiscard]] double fm_phase(double t) const {
        const double T = period();
        const double cycles = std::floor(t / T);
        const double frac = t / T - cycles;
        const double u = std::clamp(value(t) / amplitude, -1.0, 1.0);
        const double base = frac <= 0.5 ? std::acos(u) : kTwoPi - std::acos(u);
        return kTwoPi * cycles + base;
    }
};

inline SampledSignal gen_triangle(const TriangleParams& p, const TimeGrid& grid) {
    p.validate();
    return sample(grid, [&](double t) { return p.value(t); });
}

/// Amplitude 8A / (pi^2 (2k+1)^2) of harmonic (2k+1) omega0.
inline double triangle_fs_coeffs(const TriangleParams& p, std::size_t k) {
    const double m = 2.0 * static_cast<double>(k) + 1.0;
    return 8.0 * p.amplitude / (kPi * kPi * m * m);
}

/// Fourier partial sum over harmonics k = 0 .. k_max - 1.
inline SampledSignal triangle_fs_partial_sum(const TriangleParams& p, const TimeGrid& grid, std::size_t k_max) {
    return sample(grid, [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < k_max; ++k)
            acc += triangle_fs_coeffs(p, k) * std::cos((2.0 * static_cast<double>(k) + 1.0) * p.omega0 * t);
        return acc;
    });
}

/// The triangle as simple harmonic components, one per odd harmonic.
inline HilbertSpectrum triangle_shc_spectrum(const TriangleParams& p, const TimeGrid& grid, std::size_t harmonics) {
    p.validate();
    HilbertSpectrum spec{{}, SampledSignal::zeros(grid.length, grid.sample_rate, grid.t0)};
    for (std::size_t k = 0; k < harmonics; ++k) {
        const double w = (2.0 * static_cast<double>(k) + 1.0) * p.omega0;
        spec.components.push_back(make_component(std::vector<double>(grid.length, triangle_fs_coeffs(p, k)),
                                                 std::vector<double>(grid.length, w), w * grid.t0,
                                                 grid.sample_rate, grid.t0));
    }
    return spec;
}

namespace detail {

inline bool near_multiple(double t, double spacing, double offset, double tolerance) {
    const double r = (t - offset) / spacing;
    return std::abs(r - std::round(r)) * spacing <= tolerance;
}

}  // namespace detail

/// Constant-IA solution: IA = A, phase arccos(x/A) unwrapped, IF its exact
/// derivative. The IF is singular at the waveform extrema; samples within one
/// sample of an extremum are flagged and carry the one-sample secant of the
/// exact phase instead.
inline AMFMComponent triangle_fm_solution(const TriangleParams& p, const TimeGrid& grid) {
    p.validate();
    const double h = 1.0 / grid.sample_rate;
    const double half_period = 0.5 * p.period();
    AMFMComponent c;
    c.sample_rate = grid.sample_rate;
    c.t0 = grid.t0;
    c.ia.assign(grid.length, p.amplitude);
    c.if_.resize(grid.length);
    c.s.resize(grid.length);
    c.sigma.resize(grid.length);
    for (std::size_t i = 0; i < grid.length; ++i) {
        const double t = grid.time(i);
        const double theta = p.fm_phase(t);
        c.s[i] = p.amplitude * std::cos(theta);
        c.sigma[i] = p.amplitude * std::sin(theta);
        if (detail::near_multiple(t, half_period, 0.0, h * (1.0 + 1e-9))) {
            c.flagged.push_back(i);
            c.if_[i] = (p.fm_phase(t + 0.5 * h) - p.fm_phase(t - 0.5 * h)) / h;
        } else {
            const double u = p.value(t) / p.amplitude;
            c.if_[i] = (2.0 * p.omega0 / kPi) / std::sqrt(1.0 - u * u);
        }
    }
    c.phase_ref = p.fm_phase(grid.t0);
    return c;
}

/// Constant-IF solution: IF = omega0, IA = x / cos(omega0 t). Within one
/// sample of a zero of the cosine the ratio is 0/0; those samples are flagged
/// and set to the limit 2A/pi.
inline AMFMComponent triangle_am_solution(const TriangleParams& p, const TimeGrid& grid) {
    p.validate();
    const double h = 1.0 / grid.sample_rate;
    const double T = p.period();
    AMFMComponent c;
    c.sample_rate = grid.sample_rate;
    c.t0 = grid.t0;
    c.ia.resize(grid.length);
    c.if_.assign(grid.length, p.omega0);
    c.s.resize(grid.length);
    c.sigma.resize(grid.length);
    for (std::size_t i = 0; i < grid.length; ++i) {
        const double t = grid.time(i);
        const double cs = std::cos(p.omega0 * t);
        if (detail::near_multiple(t, 0.5 * T, 0.25 * T, h * (1.0 + 1e-9))) {
            c.flagged.push_back(i);
            c.ia[i] = 2.0 * p.amplitude / kPi;
        } else {
            c.ia[i] = p.value(t) / cs;
        }
        c.s[i] = c.ia[i] * cs;
        c.sigma[i] = c.ia[i] * std::sin(p.omega0 * t);
    }
    c.phase_ref = p.omega0 * grid.t0;
    return c;
}

/// Harmonic-correspondence (analytic signal) solution from partial sums of
/// sum_k e^{j 2k omega0 t} / (2k+1)^2, k < k_max: IA = (8A/pi^2) |S|,
/// IF = omega0 + d/dt arg S (evaluated from the differentiated series).
inline AMFMComponent triangle_hc_solution(const TriangleParams& p, const TimeGrid& grid, std::size_t k_max) {
    p.validate();
    if (k_max < 1) throw ContractError("triangle_hc_solution: k_max must be >= 1");
    const double scale = 8.0 * p.amplitude / (kPi * kPi);
    AMFMComponent c;
    c.sample_rate = grid.sample_rate;
    c.t0 = grid.t0;
    c.ia.resize(grid.length);
    c.if_.resize(grid.length);
    c.s.resize(grid.length);
    c.sigma.resize(grid.length);
    std::vector<double> wrapped(grid.length);
    for (std::size_t i = 0; i < grid.length; ++i) {
        const double t = grid.time(i);
        const std::complex<double> step = std::polar(1.0, 2.0 * p.omega0 * t);
        std::complex<double> rot = 1.0;
        std::complex<double> sum = 0.0, dsum = 0.0;
        for (std::size_t k = 0; k < k_max; ++k) {
            const double m = 2.0 * static_cast<double>(k) + 1.0;
            const double w = 1.0 / (m * m);
            sum += w * rot;
            dsum += (w * 2.0 * static_cast<double>(k) * p.omega0) * rot;
            rot *= step;
            if ((k & 63) == 63) rot = std::polar(1.0, 2.0 * p.omega0 * t * static_cast<double>(k + 1));
        }
        // S' = j * dsum
        const double dm = std::real(dsum * std::conj(sum)) / std::norm(sum);
        c.ia[i] = scale * std::abs(sum);
        c.if_[i] = p.omega0 + dm;
        wrapped[i] = p.omega0 * t + std::arg(sum);
    }
    const auto theta = unwrap_phase(wrapped);
    for (std::size_t i = 0; i < grid.length; ++i) {
        c.s[i] = c.ia[i] * std::cos(theta[i]);
        c.sigma[i] = c.ia[i] * std::sin(theta[i]);
    }
    c.phase_ref = theta.front();
    return c;
}

// ---------------------------------------------------------------------------
// Sinusoidal FM

/// x(t) = cos(omega_c t + B sin(omega_m t)).
struct SinFMParams {
    double omega_c = 110.0 * kPi;
    double omega_m = 4.0 * kPi;
    double B = 25.0;

    void validate() const {
        if (!(omega_c > 0.0 && omega_m > 0.0 && B > 0.0)) throw ContractError("SinFMParams: parameters must be positive");
    }
    [[nodiscard]] double phase(double t) const { return omega_c * t + B * std::sin(omega_m * t); }
    [[nodiscard]] double instantaneous_frequency(double t) const {
        return omega_c + B * omega_m * std::cos(omega_m * t);
    }
};

inline SampledSignal gen_sin_fm(const SinFMParams& p, const TimeGrid& grid) {
    return sample(grid, [&](double t) { return std::cos(p.phase(t)); });
}

/// Single FM component: IA = 1, IF = omega_c + B omega_m cos(omega_m t).
inline AMFMComponent sin_fm_solution(const SinFMParams& p, const TimeGrid& grid) {
    AMFMComponent c;
    c.sample_rate = grid.sample_rate;
    c.t0 = grid.t0;
    c.ia.assign(grid.length, 1.0);
    c.if_.resize(grid.length);
    c.s.resize(grid.length);
    c.sigma.resize(grid.length);
    for (std::size_t i = 0; i < grid.length; ++i) {
        const double t = grid.time(i);
        c.if_[i] = p.instantaneous_frequency(t);
        c.s[i] = std::cos(p.phase(t));
        c.sigma[i] = std::sin(p.phase(t));
        if (c.if_[i] < 0.0) ++c.negative_if_samples;
    }
    c.phase_ref = p.phase(grid.t0);
    return c;
}

struct BesselTerm {
    int k;
    /// J_k(B)
    double amplitude;
    /// omega_c + k omega_m, rad/s
    double omega;
};

/// Jacobi-Anger expansion cos(wc t + B sin(wm t)) = sum_k J_k(B) cos((wc + k wm) t)
/// for k in [k_min, k_max]. Phase offsets are zero in this convention.
inline std::vector<BesselTerm> sin_fm_bessel_coeffs(const SinFMParams& p, int k_min, int k_max) {
    p.validate();
    if (k_min > k_max) throw ContractError("sin_fm_bessel_coeffs: empty k range");
    const unsigned top = static_cast<unsigned>(std::max(std::abs(k_min), std::abs(k_max)));
    const auto j = bessel_j_orders(top, p.B);
    std::vector<BesselTerm> out;
    for (int k = k_min; k <= k_max; ++k) {
        const unsigned ak = static_cast<unsigned>(std::abs(k));
        const double v = (k < 0 && ak % 2 == 1) ? -j[ak] : j[ak];
        out.push_back({k, v, p.omega_c + static_cast<double>(k) * p.omega_m});
    }
    return out;
}

/// Partial synthesis from Bessel terms.
inline SampledSignal sin_fm_bessel_synthesis(const std::vector<BesselTerm>& terms, const TimeGrid& grid) {
    return sample(grid, [&](double t) {
        double acc = 0.0;
        for (const auto& term : terms) acc += term.amplitude * std::cos(term.omega * t);
        return acc;
    });
}

/// Bessel terms as simple harmonic components (IA may be negative; IF may be
/// negative for large |k|).
inline HilbertSpectrum sin_fm_shc_spectrum(const SinFMParams& p, const TimeGrid& grid, int k_min, int k_max) {
    HilbertSpectrum spec{{}, SampledSignal::zeros(grid.length, grid.sample_rate, grid.t0)};
    for (const auto& term : sin_fm_bessel_coeffs(p, k_min, k_max))
        spec.components.push_back(make_component(std::vector<double>(grid.length, term.amplitude),
                                                 std::vector<double>(grid.length, term.omega), term.omega * grid.t0,
                                                 grid.sample_rate, grid.t0));
    return spec;
}

// ---------------------------------------------------------------------------
// Synthetic example signals

enum class ExampleId { slow_am_fast_fm = 1, fast_am_slow_fm = 2 };
enum class UnitsMode { hz, rad_per_s };

/// Closed-form AM and FM laws of the two synthetic examples. The FM message
/// m(t) is added to the carrier: in `hz` mode it is read as Hz (IF = carrier
/// + 2 pi m), in `rad_per_s` mode as rad/s (IF = carrier + m). Phase is
/// accumulated from t = 0.
struct FMMessageSpec {
    ExampleId example = ExampleId::slow_am_fast_fm;
    UnitsMode units = UnitsMode::hz;

    /// Example 1 defaults to hz, example 2 to rad_per_s.
    static FMMessageSpec defaults(ExampleId id) {
        return {id, id == ExampleId::slow_am_fast_fm ? UnitsMode::hz : UnitsMode::rad_per_s};
    }

    [[nodiscard]] double carrier() const {
        return example == ExampleId::slow_am_fast_fm ? 6000.0 * kPi : 1000.0 * kPi;
    }

    [[nodiscard]] double amplitude(double t) const {
        if (example == ExampleId::slow_am_fast_fm) return std::exp(-(t - 0.5) * (t - 0.5) / 25.0);
        return 0.5 + std::sin(100.0 * kPi * t) / 3.0 + std::sin(200.0 * kPi * t) / 5.0;
    }

    [[nodiscard]] double message(double t) const {
        if (example == ExampleId::slow_am_fast_fm)
            return 250.0 * std::sin(140.0 * kPi * t) + 2000.0 * (std::exp(-4.0 * t) - 1.0);
        return 150.0 * std::sin(kTwoPi * t);
    }

    /// Integral of m from 0 to t.
    [[nodiscard]] double message_integral(double t) const {
        if (example == ExampleId::slow_am_fast_fm)
            return 250.0 * (1.0 - std::cos(140.0 * kPi * t)) / (140.0 * kPi) +
                   2000.0 * ((1.0 - std::exp(-4.0 * t)) / 4.0 - t);
        return 150.0 * (1.0 - std::cos(kTwoPi * t)) / kTwoPi;
    }

    [[nodiscard]] double message_scale() const { return units == UnitsMode::hz ? kTwoPi : 1.0; }

    /// rad/s
    [[nodiscard]] double instantaneous_frequency(double t) const { return carrier() + message_scale() * message(t); }
    [[nodiscard]] double phase(double t) const { return carrier() * t + message_scale() * message_integral(t); }
};

struct ExampleSignal {
    SampledSignal signal;
    std::vector<double> ia;
    /// rad/s
    std::vector<double> if_;
};

inline ExampleSignal gen_example_signal(const FMMessageSpec& spec, const TimeGrid& grid) {
    ExampleSignal out{sample(grid, [&](double t) { return spec.amplitude(t) * std::cos(spec.phase(t)); }), {}, {}};
    out.ia.resize(grid.length);
    out.if_.resize(grid.length);
    for (std::size_t i = 0; i < grid.length; ++i) {
        out.ia[i] = spec.amplitude(grid.time(i));
        out.if_[i] = spec.instantaneous_frequency(grid.time(i));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Two tones

/// cos(omega_a t) + cos(omega_b t), omega_b >= omega_a > 0.
inline SampledSignal gen_two_tone(double omega_a, double omega_b, const TimeGrid& grid) {
    if (!(omega_a > 0.0 && omega_b >= omega_a)) throw ContractError("gen_two_tone: need omega_b >= omega_a > 0");
    return sample(grid, [&](double t) { return std::cos(omega_a * t) + std::cos(omega_b * t); });
}

/// Beat envelope 2 |cos((omega_b - omega_a) t / 2)|.
inline double two_tone_envelope(double omega_a, double omega_b, double t) {
    return 2.0 * std::abs(std::cos(0.5 * (omega_b - omega_a) * t));
}

}  // namespace hsa

#endif  // HSA_ORACLES_HPP
