#ifndef HSA_FILTER_HPP
#define HSA_FILTER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "signal.hpp"

namespace hsa {

/// One biquad, b = (b0, b1, b2), a = (1, a1, a2).
struct Biquad {
    double b0, b1, b2, a1, a2;
};

/// Digital Butterworth low-pass as cascaded second-order sections (even
/// order), designed by the bilinear transform with a prewarped cutoff.
class ButterworthLowpass {
public:
    /// cutoff in rad/s, 0 < cutoff < pi * sample_rate.
    ButterworthLowpass(std::size_t order, double cutoff, double sample_rate) : order_(order) {
        if (order == 0 || order % 2 != 0) throw ContractError("ButterworthLowpass: order must be even and positive");
        if (!(cutoff > 0.0 && cutoff < kPi * sample_rate))
            throw ContractError("ButterworthLowpass: cutoff must lie in (0, pi * sample_rate)");
        const double fs2 = 2.0 * sample_rate;
        const double warped = fs2 * std::tan(0.5 * cutoff / sample_rate);
        const auto n = static_cast<double>(order);
        for (std::size_t k = 0; k < order / 2; ++k) {
            const double angle = kPi * (2.0 * static_cast<double>(k) + n + 1.0) / (2.0 * n);
            const std::complex<double> pole = warped * std::polar(1.0, angle);
            const std::complex<double> zp = (fs2 + pole) / (fs2 - pole);
            Biquad s{};
            s.a1 = -2.0 * zp.real();
            s.a2 = std::norm(zp);
            const double g = (1.0 + s.a1 + s.a2) / 4.0;  // unit gain at DC
            s.b0 = g;
            s.b1 = 2.0 * g;
            s.b2 = g;
            sections_.push_back(s);
        }
    }

    /// Smallest even order whose forward-backward response is at most -20 dB
    /// at 1.1 x cutoff, i.e. a transition band no wider than 10% of cutoff.
    static std::size_t order_for_transition(double cutoff, double sample_rate, std::size_t max_order = 64) {
        const double edge = 1.1 * cutoff;
        if (edge >= kPi * sample_rate) return 2;
        const double ratio = std::tan(0.5 * edge / sample_rate) / std::tan(0.5 * cutoff / sample_rate);
        for (std::size_t n = 2; n < max_order; n += 2) {
            const double mag2 = 1.0 / (1.0 + std::pow(ratio, 2.0 * static_cast<double>(n)));
            if (mag2 <= 0.1) return n;
        }
        return max_order;
    }

    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] const std::vector<Biquad>& sections() const noexcept { return sections_; }

    /// Causal filtering, state initialized to the steady state of x[0].
    void filter_in_place(std::vector<double>& x) const {
        if (x.empty()) return;
        for (const auto& s : sections_) {
            const double u = x.front();
            double z2 = (s.b2 - s.a2) * u;
            double z1 = (s.b1 - s.a1) * u + z2;
            for (double& v : x) {
                const double in = v;
                const double y = s.b0 * in + z1;
                z1 = s.b1 * in - s.a1 * y + z2;
                z2 = s.b2 * in - s.a2 * y;
                v = y;
            }
        }
    }

    /// Zero-phase forward-backward filtering with odd reflection padding.
    [[nodiscard]] std::vector<double> filtfilt(std::span<const double> x, std::size_t pad) const {
        const std::size_t n = x.size();
        if (n == 0) return {};
        pad = std::min(pad, n - 1);
        std::vector<double> buf;
        buf.reserve(n + 2 * pad);
        for (std::size_t i = pad; i >= 1; --i) buf.push_back(2.0 * x[0] - x[i]);
        buf.insert(buf.end(), x.begin(), x.end());
        for (std::size_t i = 1; i <= pad; ++i) buf.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
        filter_in_place(buf);
        std::reverse(buf.begin(), buf.end());
        filter_in_place(buf);
        std::reverse(buf.begin(), buf.end());
        return {buf.begin() + static_cast<std::ptrdiff_t>(pad), buf.begin() + static_cast<std::ptrdiff_t>(pad + n)};
    }

    /// |H(e^{jw})|^2 of one causal pass at w rad/s.
    [[nodiscard]] double power_response(double omega, double sample_rate) const {
        const std::complex<double> z = std::polar(1.0, omega / sample_rate);
        const std::complex<double> zi = 1.0 / z;
        std::complex<double> h = 1.0;
        for (const auto& s : sections_)
            h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
        return std::norm(h);
    }

private:
    std::size_t order_;
    std::vector<Biquad> sections_;
};

}  // namespace hsa

#endif  // HSA_FILTER_HPP
