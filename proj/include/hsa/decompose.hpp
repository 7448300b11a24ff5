#ifndef HSA_DECOMPOSE_HPP
#define HSA_DECOMPOSE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "errors.hpp"
#include "filter.hpp"
#include "parallel.hpp"
#include "sift.hpp"
#include "signal.hpp"

namespace hsa {

struct DecomposeConfig {
    SiftConfig sift;
    /// Ensemble size I.
    std::size_t trials = 1;
    /// Per-level SNR factors beta_k; levels past the end reuse the last value.
    std::vector<double> snr_factors{0.0};
    /// Stop once the residual energy falls to this fraction of the input energy.
    double energy_threshold = 1e-10;
    std::uint64_t noise_seed = 0;
    std::size_t max_components = 16;
    /// Worker threads for ensemble trials (0 = hardware concurrency).
    std::size_t threads = 0;

    [[nodiscard]] double beta(std::size_t level) const {
        if (snr_factors.empty()) return 0.0;
        return snr_factors[std::min(level, snr_factors.size() - 1)];
    }

    void validate() const {
        sift.validate();
        if (trials < 1) throw ContractError("DecomposeConfig: trials must be >= 1");
        for (double b : snr_factors)
            if (!(b >= 0.0)) throw ContractError("DecomposeConfig: SNR factors must be >= 0");
        if (!(energy_threshold >= 0.0)) throw ContractError("DecomposeConfig: energy threshold must be >= 0");
        if (max_components < 1) throw ContractError("DecomposeConfig: max_components must be >= 1");
    }
};

enum class MaskKind { filtered_noise, sifted_noise, custom };

struct MaskingSignal {
    std::vector<double> samples;
    /// rad/s; 0 when not applicable.
    double cutoff = 0.0;
    MaskKind kind = MaskKind::custom;
};

/// Stateless seed mixing (splitmix64) so every (seed, level, trial) triple
/// gets its own generator regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// Zero-mean, unit-variance white Gaussian noise.
inline std::vector<double> white_noise(std::size_t length, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> w(length);
    for (double& v : w) v = dist(gen);
    return w;
}

namespace detail {

inline void scale_to_rms(std::vector<double>& x, double rms) {
    const double current = std::sqrt(energy(x));
    const double g = current > 0.0 ? rms / current : 0.0;
    for (double& v : x) v *= g;
}

}  // namespace detail

/// White Gaussian noise through a zero-phase Butterworth low-pass at `cutoff`
/// (rad/s), scaled to `amplitude_rms`. Deterministic per seed.
inline MaskingSignal make_masking_noise(std::size_t length, double sample_rate, double cutoff, double amplitude_rms,
                                        std::uint64_t seed) {
    if (!(cutoff > 0.0 && cutoff < kPi * sample_rate))
        throw ContractError("make_masking_noise: cutoff must lie in (0, pi * sample_rate)");
    if (!(amplitude_rms >= 0.0)) throw ContractError("make_masking_noise: negative amplitude");
    MaskingSignal mask;
    mask.cutoff = cutoff;
    mask.kind = MaskKind::filtered_noise;
    if (amplitude_rms == 0.0 || length == 0) {
        mask.samples.assign(length, 0.0);
        return mask;
    }
    const std::size_t order = ButterworthLowpass::order_for_transition(cutoff, sample_rate);
    const ButterworthLowpass lp(order, cutoff, sample_rate);
    const double cutoff_hz = cutoff / kTwoPi;
    const auto pad = static_cast<std::size_t>(3.0 * static_cast<double>(order) * std::ceil(sample_rate / cutoff_hz));
    mask.samples = lp.filtfilt(white_noise(length, seed), pad);
    detail::scale_to_rms(mask.samples, amplitude_rms);
    return mask;
}

/// a^2-weighted mean of the IF, in rad/s.
inline double amplitude_weighted_if(const AMFMComponent& c) {
    if (c.ia.size() != c.if_.size() || c.ia.empty())
        throw DimensionError("amplitude_weighted_if: IA and IF must be populated with equal lengths");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.ia.size(); ++i) {
        const double w = c.ia[i] * c.ia[i];
        num += w * c.if_[i];
        den += w;
    }
    if (!(den > 0.0)) throw NumericError("amplitude_weighted_if: zero IA energy");
    return num / den;
}

/// Average of the sifts of x + v and x - v.
inline SampledSignal tone_mask(const SampledSignal& x, const MaskingSignal& v, const SiftConfig& cfg = {}) {
    if (v.samples.size() != x.size()) throw DimensionError("tone_mask: mask length differs from signal");
    std::vector<double> plus(x.size()), minus(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] = x[i] + v.samples[i];
        minus[i] = x[i] - v.samples[i];
    }
    const auto a = detail::sift(plus, cfg).imf;
    const auto b = detail::sift(minus, cfg).imf;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
    return x.with_samples(std::move(out));
}

namespace detail {

struct RawDecomposition {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residual;
};

inline RawDecomposition emd(std::span<const double> x, const DecomposeConfig& cfg, double threshold) {
    RawDecomposition d;
    d.residual.assign(x.begin(), x.end());
    while (d.imfs.size() < cfg.max_components) {
        if (energy(d.residual) <= threshold) break;
        std::vector<double> imf;
        try {
            imf = sift(d.residual, cfg.sift).imf;
        } catch (const NotSiftableError&) {
            break;
        }
        for (std::size_t i = 0; i < imf.size(); ++i) d.residual[i] -= imf[i];
        d.imfs.push_back(std::move(imf));
    }
    return d;
}

inline bool within_bound(std::span<const double> x, double bound) {
    for (double v : x)
        if (!(std::abs(v) <= bound)) return false;
    return true;
}

inline Decomposition wrap(const SampledSignal& grid, RawDecomposition raw) {
    Decomposition out{{}, grid.with_samples(std::move(raw.residual))};
    out.imfs.reserve(raw.imfs.size());
    for (auto& imf : raw.imfs) out.imfs.push_back(grid.with_samples(std::move(imf)));
    return out;
}

/// Trials whose samples exceed this are dropped from ensemble means.
inline double outlier_bound(std::span<const double> x) { return 1e6 * std::max(max_abs(x), 1e-300); }

}  // namespace detail

/// Empirical mode decomposition: sift, subtract, repeat until the residual is
/// not siftable, its energy falls below the threshold, or the component cap
/// is reached. Reconstruction is exact up to rounding.
inline Decomposition emd(const SampledSignal& x, const DecomposeConfig& cfg = {}) {
    cfg.validate();
    const double threshold = cfg.energy_threshold * energy(x.samples());
    return detail::wrap(x, detail::emd(x.samples(), cfg, threshold));
}

/// Ensemble EMD over x + w_i with white noise of standard deviation
/// beta_0 * std(x). IMFs are aligned by level index and missing levels count
/// as zero. Perfect reconstruction is not guaranteed.
inline Decomposition eemd(const SampledSignal& x, const DecomposeConfig& cfg = {}) {
    cfg.validate();
    const std::size_t n = x.size();
    const double threshold = cfg.energy_threshold * energy(x.samples());
    const double noise_sd = cfg.beta(0) * stddev(x.samples());
    const double bound = detail::outlier_bound(x.samples());

    std::vector<std::optional<detail::RawDecomposition>> runs(cfg.trials);
    parallel_for(
        cfg.trials,
        [&](std::size_t i) {
            std::vector<double> xi = x.values();
            if (noise_sd > 0.0) {
                const auto w = white_noise(n, derive_seed(cfg.noise_seed, i));
                for (std::size_t t = 0; t < n; ++t) xi[t] += noise_sd * w[t];
            }
            auto d = detail::emd(xi, cfg, threshold);
            bool ok = detail::within_bound(d.residual, bound);
            for (const auto& imf : d.imfs) ok = ok && detail::within_bound(imf, bound);
            if (ok) runs[i] = std::move(d);
        },
        cfg.threads);

    std::size_t kept = 0, levels = 0;
    for (const auto& r : runs)
        if (r) {
            ++kept;
            levels = std::max(levels, r->imfs.size());
        }
    if (kept == 0) throw NumericError("eemd: every trial was dropped as numerically unstable");

    detail::RawDecomposition mean;
    mean.imfs.assign(levels, std::vector<double>(n, 0.0));
    mean.residual.assign(n, 0.0);
    for (const auto& r : runs) {
        if (!r) continue;
        for (std::size_t k = 0; k < r->imfs.size(); ++k)
            for (std::size_t t = 0; t < n; ++t) mean.imfs[k][t] += r->imfs[k][t];
        for (std::size_t t = 0; t < n; ++t) mean.residual[t] += r->residual[t];
    }
    const double inv = 1.0 / static_cast<double>(kept);
    if (kept > 1) {
        for (auto& imf : mean.imfs)
            for (double& v : imf) v *= inv;
        for (double& v : mean.residual) v *= inv;
    }
    return detail::wrap(x, std::move(mean));
}

namespace detail {

/// Mean over trials of sift(base + perturbation_i); trials that cannot be
/// sifted or blow up are skipped. Empty result when no trial survives.
template <typename Perturbation>
std::optional<std::vector<double>> ensemble_sift(std::span<const double> base, std::size_t trials,
                                                 Perturbation&& perturbation, const SiftConfig& sift_cfg,
                                                 double bound, std::size_t threads) {
    const std::size_t n = base.size();
    std::vector<std::optional<std::vector<double>>> runs(trials);
    parallel_for(
        trials,
        [&](std::size_t i) {
            std::vector<double> xi(base.begin(), base.end());
            const std::vector<double> p = perturbation(i);
            for (std::size_t t = 0; t < n; ++t) xi[t] += p[t];
            try {
                auto imf = sift(xi, sift_cfg).imf;
                if (within_bound(imf, bound)) runs[i] = std::move(imf);
            } catch (const NotSiftableError&) {
            }
        },
        threads);
    std::vector<double> mean(n, 0.0);
    std::size_t kept = 0;
    for (const auto& r : runs) {
        if (!r) continue;
        ++kept;
        for (std::size_t t = 0; t < n; ++t) mean[t] += (*r)[t];
    }
    if (kept == 0) return std::nullopt;
    if (kept > 1) {
        const double inv = 1.0 / static_cast<double>(kept);
        for (double& v : mean) v *= inv;
    }
    return mean;
}

}  // namespace detail

/// Complete EEMD. Level 0 averages sifts of x + beta_0 w_i; level k >= 1
/// averages sifts of r_{k-1} + beta_k EMD_k(w_i), where EMD_k(w_i) is the k-th
/// IMF of the same noise realization. Each perturbation is scaled to an RMS
/// of beta_k * std(current residual). The averaged IMF is subtracted before the
/// next level, so reconstruction is exact up to rounding.
inline Decomposition ceemd(const SampledSignal& x, const DecomposeConfig& cfg = {}) {
    cfg.validate();
    const std::size_t n = x.size();
    const double threshold = cfg.energy_threshold * energy(x.samples());
    const double bound = detail::outlier_bound(x.samples());

    bool noisy = false;
    for (std::size_t k = 0; k <= cfg.max_components; ++k) noisy = noisy || cfg.beta(k) > 0.0;

    std::vector<std::vector<double>> noise;
    std::vector<std::vector<std::vector<double>>> noise_imfs;
    if (noisy) {
        noise.resize(cfg.trials);
        noise_imfs.resize(cfg.trials);
        DecomposeConfig noise_cfg = cfg;
        noise_cfg.max_components = cfg.max_components;
        parallel_for(
            cfg.trials,
            [&](std::size_t i) {
                noise[i] = white_noise(n, derive_seed(cfg.noise_seed, i));
                noise_imfs[i] = detail::emd(noise[i], noise_cfg, 0.0).imfs;
            },
            cfg.threads);
    }

    detail::RawDecomposition out;
    out.residual = x.values();
    for (std::size_t level = 0; out.imfs.size() < cfg.max_components; ++level) {
        if (energy(out.residual) <= threshold) break;
        const double beta = cfg.beta(level);
        std::optional<std::vector<double>> imf;
        if (beta == 0.0) {
            try {
                imf = detail::sift(out.residual, cfg.sift).imf;
            } catch (const NotSiftableError&) {
            }
        } else {
            // not siftable on its own means the loop is done, whatever the noise
            {
                std::vector<Extremum> mx, mn;
                detail::find_extrema(out.residual, &mx, &mn);
                if (mx.size() < 2 || mn.size() < 2) break;
            }
            const double scale = beta * stddev(out.residual);
            auto perturbation = [&](std::size_t i) {
                std::vector<double> p;
                if (level == 0) p = noise[i];
                else if (level - 1 < noise_imfs[i].size()) p = noise_imfs[i][level - 1];
                else return std::vector<double>(n, 0.0);
                detail::scale_to_rms(p, 1.0);
                for (double& v : p) v *= scale;
                return p;
            };
            imf = detail::ensemble_sift(out.residual, cfg.trials, perturbation, cfg.sift, bound, cfg.threads);
        }
        if (!imf) break;
        for (std::size_t t = 0; t < n; ++t) out.residual[t] -= (*imf)[t];
        out.imfs.push_back(std::move(*imf));
    }
    return detail::wrap(x, std::move(out));
}

}  // namespace hsa

#endif  // HSA_DECOMPOSE_HPP
