#ifndef HSA_HSA_HPP
#define HSA_HSA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "decompose.hpp"
#include "demod.hpp"
#include "errors.hpp"
#include "signal.hpp"

namespace hsa {

namespace detail {

inline AMFMComponent demod_or_flag(const SampledSignal& imf, double smoothing_seconds) {
    try {
        return imf_demod(imf, smoothing_seconds);
    } catch (const Error&) {
        AMFMComponent c;
        c.sample_rate = imf.sample_rate();
        c.t0 = imf.t0();
        c.s = imf.values();
        c.ia.assign(imf.size(), 0.0);
        c.if_.assign(imf.size(), 0.0);
        c.sigma.assign(imf.size(), 0.0);
        c.flagged.resize(imf.size());
        for (std::size_t i = 0; i < imf.size(); ++i) c.flagged[i] = i;
        return c;
    }
}

}  // namespace detail

/// Masks for the custom kind: (level, trial, length) -> unit-RMS mask samples.
using CustomMaskFn = std::function<std::vector<double>(std::size_t level, std::size_t trial, std::size_t length)>;

struct HSAConfig {
    DecomposeConfig decompose;
    /// IF moving-average window in seconds.
    double smoothing_seconds = 1e-3;
    MaskKind mask_kind = MaskKind::filtered_noise;
    /// Mask cutoff for level k > 0 as a fraction of the amplitude-weighted IF
    /// of component k - 1.
    double cutoff_fraction = 0.9;
    /// Level-0 mask cutoff as a fraction of the Nyquist frequency.
    double first_cutoff_fraction = 0.9;
    CustomMaskFn custom_mask;

    void validate() const {
        decompose.validate();
        if (!(smoothing_seconds >= 0.0)) throw ContractError("HSAConfig: negative smoothing window");
        if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0))
            throw ContractError("HSAConfig: cutoff_fraction must lie in (0, 1]");
        if (!(first_cutoff_fraction > 0.0 && first_cutoff_fraction < 1.0))
            throw ContractError("HSAConfig: first_cutoff_fraction must lie in (0, 1)");
        if (mask_kind == MaskKind::custom && !custom_mask)
            throw ContractError("HSAConfig: custom mask kind needs a mask function");
    }
};

struct HSAResult {
    HilbertSpectrum spectrum;
    /// Mask cutoff (rad/s) used at each level; 0 where no mask was applied.
    std::vector<double> cutoffs;
};

/// Integrated decomposition and demodulation. Each level averages I tone-masked
/// sifts of the current residual, with masks scaled to beta_k times the
/// residual's RMS, then demodulates the average. For the
/// filtered-noise mask the cutoff at level k > 0 follows the previous
/// component's amplitude-weighted IF, so demodulation feeds back into the
/// decomposition. Stops when the residual energy drops below the threshold,
/// the residual cannot be sifted, or the component cap is hit.
inline HSAResult hsa_imf_detailed(const SampledSignal& x, const HSAConfig& cfg) {
    cfg.validate();
    const DecomposeConfig& dc = cfg.decompose;
    const std::size_t n = x.size();
    const double fs = x.sample_rate();
    const double threshold = dc.energy_threshold * energy(x.samples());
    const double bound = detail::outlier_bound(x.samples());
    const double nyquist = kPi * fs;

    std::vector<std::vector<std::vector<double>>> noise_imfs;
    auto sifted_noise_imfs = [&]() -> const std::vector<std::vector<std::vector<double>>>& {
        if (noise_imfs.empty()) {
            noise_imfs.resize(dc.trials);
            parallel_for(
                dc.trials,
                [&](std::size_t i) {
                    noise_imfs[i] = detail::emd(white_noise(n, derive_seed(dc.noise_seed, i)), dc, 0.0).imfs;
                },
                dc.threads);
        }
        return noise_imfs;
    };

    HSAResult result{{{}, x}, {}};
    std::vector<double> residual = x.values();
    std::optional<double> previous_awif;
    for (std::size_t level = 0; result.spectrum.components.size() < dc.max_components; ++level) {
        if (energy(residual) <= threshold) break;
        {
            std::vector<Extremum> mx, mn;
            detail::find_extrema(residual, &mx, &mn);
            if (mx.size() < 2 || mn.size() < 2) break;
        }

        const double beta = dc.beta(level);
        double cutoff = 0.0;
        std::optional<std::vector<double>> imf;
        if (beta == 0.0) {
            try {
                imf = detail::sift(residual, dc.sift).imf;
            } catch (const NotSiftableError&) {
            }
        } else {
            const double scale = beta * std::sqrt(energy(residual));
            if (cfg.mask_kind == MaskKind::filtered_noise) {
                cutoff = previous_awif ? cfg.cutoff_fraction * *previous_awif : cfg.first_cutoff_fraction * nyquist;
                cutoff = std::clamp(cutoff, 1e-6 * nyquist, cfg.first_cutoff_fraction * nyquist);
            }
            if (cfg.mask_kind == MaskKind::sifted_noise) sifted_noise_imfs();
            std::vector<std::optional<std::vector<double>>> runs(dc.trials);
            parallel_for(
                dc.trials,
                [&](std::size_t i) {
                    MaskingSignal v;
                    switch (cfg.mask_kind) {
                        case MaskKind::filtered_noise:
                            v = make_masking_noise(n, fs, cutoff, 1.0, derive_seed(dc.noise_seed, level, i));
                            break;
                        case MaskKind::sifted_noise:
                            v.kind = MaskKind::sifted_noise;
                            if (level < noise_imfs[i].size()) v.samples = noise_imfs[i][level];
                            else v.samples.assign(n, 0.0);
                            detail::scale_to_rms(v.samples, 1.0);
                            break;
                        case MaskKind::custom:
                            v.samples = cfg.custom_mask(level, i, n);
                            if (v.samples.size() != n) throw DimensionError("hsa_imf: custom mask has wrong length");
                            break;
                    }
                    for (double& s : v.samples) s *= scale;
                    try {
                        auto tm = tone_mask(x.with_samples(residual), v, dc.sift).values();
                        if (detail::within_bound(tm, bound)) runs[i] = std::move(tm);
                    } catch (const NotSiftableError&) {
                    }
                },
                dc.threads);
            std::vector<double> mean(n, 0.0);
            std::size_t kept = 0;
            for (const auto& r : runs) {
                if (!r) continue;
                ++kept;
                for (std::size_t t = 0; t < n; ++t) mean[t] += (*r)[t];
            }
            if (kept > 0) {
                if (kept > 1)
                    for (double& v : mean) v /= static_cast<double>(kept);
                imf = std::move(mean);
            }
        }
        if (!imf) break;

        // An IMF that cannot be demodulated is kept fully flagged so the
        // decomposition stays complete; the next cutoff then steps down from
        // this one.
        AMFMComponent component = detail::demod_or_flag(x.with_samples(*imf), cfg.smoothing_seconds);
        const double awif = component.flagged.size() == n ? 0.0 : amplitude_weighted_if(component);
        if (awif > 0.0 && std::isfinite(awif)) previous_awif = awif;
        else if (cutoff > 0.0) previous_awif = cutoff;
        for (std::size_t t = 0; t < n; ++t) residual[t] -= (*imf)[t];
        result.spectrum.components.push_back(std::move(component));
        result.cutoffs.push_back(cutoff);
    }
    result.spectrum.residual = x.with_samples(std::move(residual));
    return result;
}

inline HilbertSpectrum hsa_imf(const SampledSignal& x, const HSAConfig& cfg = {}) {
    return hsa_imf_detailed(x, cfg).spectrum;
}

/// Demodulates every IMF of a decomposition with imf_demod. IMFs that cannot be
/// demodulated are kept with zero IA/IF and every sample flagged.
inline HilbertSpectrum demodulate(const Decomposition& d, double smoothing_seconds = 0.0) {
    HilbertSpectrum spec{{}, d.residual};
    for (const auto& imf : d.imfs) spec.components.push_back(detail::demod_or_flag(imf, smoothing_seconds));
    return spec;
}

}  // namespace hsa

#endif  // HSA_HSA_HPP
