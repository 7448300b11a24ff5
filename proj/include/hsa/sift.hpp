#ifndef HSA_SIFT_HPP
#define HSA_SIFT_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "envelope.hpp"
#include "errors.hpp"
#include "signal.hpp"

namespace hsa {

struct SiftConfig {
    /// Step size on the mean-envelope removal, 0 < alpha <= 1.
    double alpha = 0.95;
    /// Stop once 10 log10(E[r_start] / E[e]) exceeds this many decibels.
    double resolution_db = 50.0;
    std::size_t max_iterations = 50;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("SiftConfig: alpha must be in (0, 1]");
        if (max_iterations < 1) throw ContractError("SiftConfig: max_iterations must be >= 1");
        if (std::isnan(resolution_db)) throw ContractError("SiftConfig: resolution_db is NaN");
    }
};

/// Working state of one sift.
struct SiftState {
    std::vector<double> r;
    std::vector<double> e;
    std::size_t iteration = 0;
};

struct SiftResult {
    std::vector<double> imf;
    std::size_t iterations = 0;
    /// Resolution factor (dB) at the last envelope evaluated.
    double final_resolution_db = 0.0;
};

namespace detail {

inline SiftResult sift(std::span<const double> x, const SiftConfig& cfg) {
    cfg.validate();
    SiftState st;
    st.r.assign(x.begin(), x.end());
    const double start_energy = energy(x);
    std::vector<Extremum> maxima, minima;
    SiftResult out;
    for (;;) {
        EnvelopePair env;
        try {
            env = envelopes(st.r, maxima, minima);
        } catch (const NotSiftableError&) {
            if (st.iteration == 0) throw;
            break;
        }
        st.e = std::move(env.mean);
        const double e_energy = energy(st.e);
        out.final_resolution_db = e_energy > 0.0 ? 10.0 * std::log10(start_energy / e_energy)
                                                 : std::numeric_limits<double>::infinity();
        if (out.final_resolution_db > cfg.resolution_db) break;
        if (st.iteration >= cfg.max_iterations) break;
        for (std::size_t i = 0; i < st.r.size(); ++i) st.r[i] -= cfg.alpha * st.e[i];
        ++st.iteration;
    }
    out.imf = std::move(st.r);
    out.iterations = st.iteration;
    return out;
}

}  // namespace detail

/// One IMF estimate: repeatedly subtracts alpha times the mean envelope until
/// the resolution factor passes `resolution_db` or `max_iterations` updates
/// have been made. Throws NotSiftableError if the input has fewer than two
/// maxima or two minima.
inline SampledSignal sift(const SampledSignal& x, const SiftConfig& cfg = {}) {
    return x.with_samples(detail::sift(x.samples(), cfg).imf);
}

struct ImfCheck {
    /// |#extrema - #zero crossings| <= 1
    bool c1 = false;
    /// max |mean envelope| / max |x| over the central 80%; empty when the
    /// signal cannot be enveloped.
    std::optional<double> c2_max_dev;
    std::size_t extrema = 0;
    std::size_t zero_crossings = 0;
};

inline ImfCheck is_imf(const SampledSignal& x) {
    ImfCheck check;
    const ExtremaSet set = find_extrema(x);
    check.extrema = set.extrema_count();
    check.zero_crossings = set.zero_crossings;
    if (set.maxima.size() < 2 || set.minima.size() < 2) return check;
    const auto diff = static_cast<long long>(check.extrema) - static_cast<long long>(check.zero_crossings);
    check.c1 = diff >= -1 && diff <= 1;
    const EnvelopePair env = envelopes(x);
    const IndexRange mid = central_range(x.size(), 0.8);
    double dev = 0.0;
    for (std::size_t i = mid.begin; i < mid.end; ++i) dev = std::max(dev, std::abs(env.mean[i]));
    const double peak = max_abs(x.samples());
    check.c2_max_dev = peak > 0.0 ? dev / peak : 0.0;
    return check;
}

}  // namespace hsa

#endif  // HSA_SIFT_HPP
