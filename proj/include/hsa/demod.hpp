#ifndef HSA_DEMOD_HPP
#define HSA_DEMOD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "envelope.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "signal.hpp"

namespace hsa {

/// Unit-amplitude FM waveform with its estimated quadrature.
struct FMSignal {
    std::vector<double> s_fm;
    std::vector<double> sigma_fm;
    /// Seconds; points where the quadrature passes through zero.
    std::vector<double> unstable_times;
    /// Sample indices replaced by interpolation.
    std::vector<std::size_t> interpolated;
    double sample_rate = 1.0;
    double t0 = 0.0;
};

namespace detail {

inline std::vector<double> ia_est(std::span<const double> imf) {
    std::vector<double> r(imf.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::abs(imf[i]);
    std::vector<Extremum> maxima;
    find_extrema(r, &maxima, nullptr);
    if (maxima.size() < 2) throw NotSiftableError("ia_est: |imf| has fewer than two maxima");
    return mirrored_envelope(maxima, r.size());
}

/// Lagrange polynomial through the given points, evaluated at x.
inline double lagrange(std::span<const double> xs, std::span<const double> ys, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
        acc += w * ys[i];
    }
    return acc;
}

/// Replaces each flagged run with a cubic through two good samples on each side
/// (fewer when the run touches an end).
inline void fill_flagged_runs(std::vector<double>& y, const std::vector<bool>& flagged) {
    const std::size_t n = y.size();
    std::size_t i = 0;
    while (i < n) {
        if (!flagged[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && flagged[j + 1]) ++j;
        std::vector<double> xs, ys;
        for (std::size_t k = i, found = 0; k-- > 0 && found < 2;) {
            if (flagged[k]) continue;
            xs.insert(xs.begin(), static_cast<double>(k));
            ys.insert(ys.begin(), y[k]);
            ++found;
        }
        for (std::size_t k = j + 1, found = 0; k < n && found < 2; ++k) {
            if (flagged[k]) continue;
            xs.push_back(static_cast<double>(k));
            ys.push_back(y[k]);
            ++found;
        }
        if (!xs.empty())
            for (std::size_t k = i; k <= j; ++k) y[k] = lagrange(xs, ys, static_cast<double>(k));
        i = j + 1;
    }
}

}  // namespace detail

/// IA estimate: cubic spline through the refined maxima of |imf|, with the
/// same end mirroring as the sifting envelopes.
inline std::vector<double> ia_est(const SampledSignal& imf) { return detail::ia_est(imf.samples()); }

/// Divides out the IA estimate up to three times, stopping early once the
/// estimate is within 1e-3 of one everywhere.
inline FMSignal iter_am_removal(const SampledSignal& imf) {
    std::vector<double> g = imf.values();
    for (int pass = 0; pass < 3; ++pass) {
        const auto b = detail::ia_est(g);
        double dev = 0.0;
        for (double v : b) dev = std::max(dev, std::abs(v - 1.0));
        if (dev <= 1e-3) break;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(b[i] >= 1e-12)) throw NumericError("iter_am_removal: amplitude estimate vanishes");
            g[i] /= b[i];
        }
    }
    FMSignal f;
    f.s_fm = std::move(g);
    f.sample_rate = imf.sample_rate();
    f.t0 = imf.t0();
    return f;
}

/// Quadrature of a unit FM signal: -sgn(d s/dt) sqrt(1 - s^2), with s clipped
/// to [-1, 1] and the slope sign taken between refined extrema of s. Samples
/// within two of each zero of the quadrature (fewer where zeros are closer
/// than nine samples apart) are replaced by cubic interpolation.
inline FMSignal quadrature_fm(FMSignal f) {
    const std::size_t n = f.s_fm.size();
    if (n < 3) throw ContractError("quadrature_fm: need at least 3 samples");
    for (double& v : f.s_fm) v = std::clamp(v, -1.0, 1.0);
    std::vector<double>& sigma = f.sigma_fm;
    sigma.resize(n);

    // s_fm is monotone between its refined extrema, so the sign of its
    // derivative is read off the segment each sample falls in.
    std::vector<Extremum> mx, mn;
    detail::find_extrema(f.s_fm, &mx, &mn);
    std::vector<std::pair<double, bool>> events;  // (position, is_max)
    for (const auto& e : mx) events.emplace_back(e.position, true);
    for (const auto& e : mn) events.emplace_back(e.position, false);
    std::sort(events.begin(), events.end());
    std::vector<std::size_t> centers;
    if (events.empty()) {
        const auto ds = differentiate(f.s_fm, f.sample_rate);
        for (std::size_t i = 0; i < n; ++i) {
            const double sgn = (ds[i] > 0.0) - (ds[i] < 0.0);
            sigma[i] = -sgn * std::sqrt(std::max(0.0, 1.0 - f.s_fm[i] * f.s_fm[i]));
        }
    } else {
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (next < events.size() && events[next].first <= static_cast<double>(i)) ++next;
            // falling after a maximum, rising before one
            const bool falling = next > 0 ? events[next - 1].second : !events[0].second;
            const double mag = std::sqrt(std::max(0.0, 1.0 - f.s_fm[i] * f.s_fm[i]));
            sigma[i] = falling ? mag : -mag;
        }
        for (const auto& e : events)
            centers.push_back(std::min(n - 1, static_cast<std::size_t>(std::llround(std::max(0.0, e.first)))));
    }
    for (std::size_t i = 0; i < n; ++i)
        if (sigma[i] == 0.0) centers.push_back(i);
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

    // Up to two samples either side, shrunk where zeros crowd together so
    // good samples remain between neighbouring gaps.
    constexpr std::size_t kNeighborhood = 2;
    std::vector<bool> flagged(n, false);
    f.unstable_times.clear();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const std::size_t c = centers[j];
        std::size_t gap = n;
        if (j > 0) gap = std::min(gap, c - centers[j - 1]);
        if (j + 1 < centers.size()) gap = std::min(gap, centers[j + 1] - c);
        f.unstable_times.push_back(f.t0 + static_cast<double>(c) / f.sample_rate);
        if (gap < 3) continue;
        const std::size_t eps = std::min(kNeighborhood, (gap - 1) / 4);
        const std::size_t lo = c >= eps ? c - eps : 0;
        const std::size_t hi = std::min(n - 1, c + eps);
        for (std::size_t k = lo; k <= hi; ++k) flagged[k] = true;
    }
    detail::fill_flagged_runs(sigma, flagged);
    f.interpolated.clear();
    for (std::size_t i = 0; i < n; ++i)
        if (flagged[i]) f.interpolated.push_back(i);
    return f;
}

/// Hilbert-transform-free demodulation of an IMF: IA from the |imf| maxima
/// spline, phase from the four-quadrant angle of s_fm + j sigma_fm, IF as its
/// derivative, optionally moving-averaged over `smooth_window_seconds`.
inline AMFMComponent imf_demod(const SampledSignal& imf, double smooth_window_seconds = 0.0) {
    if (!(smooth_window_seconds >= 0.0)) throw ContractError("imf_demod: negative smoothing window");
    const std::size_t n = imf.size();
    AMFMComponent c;
    c.sample_rate = imf.sample_rate();
    c.t0 = imf.t0();
    c.ia = detail::ia_est(imf.samples());
    const FMSignal f = quadrature_fm(iter_am_removal(imf));
    std::vector<double> wrapped(n);
    for (std::size_t i = 0; i < n; ++i) wrapped[i] = std::atan2(f.sigma_fm[i], f.s_fm[i]);
    const auto theta = unwrap_phase(wrapped);
    c.if_ = differentiate(theta, c.sample_rate);
    if (smooth_window_seconds > 0.0) c.if_ = moving_average(SampledSignal(c.if_, c.sample_rate), smooth_window_seconds).values();
    c.phase_ref = theta.front();
    c.s = imf.values();
    c.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.sigma[i] = c.ia[i] * f.sigma_fm[i];
    c.flagged = f.interpolated;
    for (double w : c.if_)
        if (w < 0.0) ++c.negative_if_samples;
    return c;
}

/// Analytic-signal (Hilbert transform) demodulation: doubles the positive
/// frequencies, zeroes the negative ones, and reads IA/IF off the result.
inline AMFMComponent gabor_as_demod(const SampledSignal& x) {
    const std::size_t n = x.size();
    if (n < 3) throw ContractError("gabor_as_demod: need at least 3 samples");
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = x[i];
    spec = fft::forward(spec);
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < n; ++k) {
        if (k < (n + 1) / 2) spec[k] *= 2.0;
        else if (!(n % 2 == 0 && k == half)) spec[k] = 0.0;
    }
    const auto z = fft::inverse(spec);

    AMFMComponent c;
    c.sample_rate = x.sample_rate();
    c.t0 = x.t0();
    c.ia.resize(n);
    c.sigma.resize(n);
    std::vector<double> wrapped(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.ia[i] = std::abs(z[i]);
        c.sigma[i] = z[i].imag();
        wrapped[i] = std::arg(z[i]);
    }
    const auto theta = unwrap_phase(wrapped);
    c.if_ = differentiate(theta, c.sample_rate);
    c.phase_ref = theta.front();
    c.s = x.values();
    for (double w : c.if_)
        if (w < 0.0) ++c.negative_if_samples;
    return c;
}

/// Teager-Kaiser energy Psi{x} = x'^2 - x x'' with central-difference derivatives.
inline std::vector<double> teager_energy(std::span<const double> x, double sample_rate) {
    const auto d1 = differentiate(x, sample_rate);
    const auto d2 = differentiate(d1, sample_rate);
    std::vector<double> psi(x.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = d1[i] * d1[i] - x[i] * d2[i];
    return psi;
}

/// Energy separation: omega = sqrt(Psi{x'} / Psi{x}), a = Psi{x} / sqrt(Psi{x'}).
/// Samples where either energy is non-positive are masked and linearly
/// interpolated from valid neighbours. Meant for narrowband input.
inline AMFMComponent teo_demod(const SampledSignal& x) {
    const std::size_t n = x.size();
    if (n < 5) throw ContractError("teo_demod: need at least 5 samples");
    const double fs = x.sample_rate();
    const auto dx = differentiate(x.samples(), fs);
    const auto psi_x = teager_energy(x.samples(), fs);
    const auto psi_dx = teager_energy(dx, fs);

    AMFMComponent c;
    c.sample_rate = fs;
    c.t0 = x.t0();
    c.ia.assign(n, 0.0);
    c.if_.assign(n, 0.0);
    std::vector<bool> masked(n, false);
    std::size_t valid = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (psi_x[i] > 0.0 && psi_dx[i] > 0.0) {
            c.if_[i] = std::sqrt(psi_dx[i] / psi_x[i]);
            c.ia[i] = psi_x[i] / std::sqrt(psi_dx[i]);
            ++valid;
        } else {
            masked[i] = true;
            c.flagged.push_back(i);
        }
    }
    if (valid == 0) throw NumericError("teo_demod: every sample has non-positive Teager energy");
    if (valid < n) {
        for (auto* seq : {&c.ia, &c.if_}) {
            std::vector<double>& y = *seq;
            std::size_t i = 0;
            while (i < n) {
                if (!masked[i]) {
                    ++i;
                    continue;
                }
                std::size_t j = i;
                while (j + 1 < n && masked[j + 1]) ++j;
                const bool has_left = i > 0;
                const bool has_right = j + 1 < n;
                for (std::size_t k = i; k <= j; ++k) {
                    if (has_left && has_right) {
                        const double w = static_cast<double>(k - (i - 1)) / static_cast<double>(j + 1 - (i - 1));
                        y[k] = (1.0 - w) * y[i - 1] + w * y[j + 1];
                    } else {
                        y[k] = has_left ? y[i - 1] : y[j + 1];
                    }
                }
                i = j + 1;
            }
        }
    }
    c.s = x.values();
    c.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.sigma[i] = c.if_[i] > 0.0 ? -dx[i] / c.if_[i] : 0.0;
    c.phase_ref = std::atan2(c.sigma[0], c.s[0]);
    return c;
}

}  // namespace hsa

#endif  // HSA_DEMOD_HPP
