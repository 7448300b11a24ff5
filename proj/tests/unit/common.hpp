#ifndef HSA_TESTS_COMMON_HPP
#define HSA_TESTS_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <hsa/all.hpp>

namespace testutil {

inline double correlation(std::span<const double> a, std::span<const double> b, hsa::IndexRange r) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(r.size());
    mb /= static_cast<double>(r.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
    return correlation(a, b, {0, a.size()});
}

/// RMS of (est - ref) divided by RMS of ref, over r.
inline double relative_rmse(std::span<const double> est, std::span<const double> ref, hsa::IndexRange r) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        num += (est[i] - ref[i]) * (est[i] - ref[i]);
        den += ref[i] * ref[i];
    }
    return std::sqrt(num / den);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b, hsa::IndexRange r) {
    double m = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return max_abs_diff(a, b, {0, a.size()});
}

inline double max_rel_dev(std::span<const double> est, double target, hsa::IndexRange r) {
    double m = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) m = std::max(m, std::abs(est[i] - target) / std::abs(target));
    return m;
}

inline hsa::SampledSignal tone(double freq_hz, double rate, double seconds, double amplitude = 1.0) {
    return hsa::sample(hsa::TimeGrid::seconds(rate, seconds),
                       [&](double t) { return amplitude * std::cos(hsa::kTwoPi * freq_hz * t); });
}

}  // namespace testutil

#endif  // HSA_TESTS_COMMON_HPP
