#ifndef HSA_ENVELOPE_HPP
#define HSA_ENVELOPE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "signal.hpp"

namespace hsa {

/// A refined local extremum. `position` is the fractional sample index of the
/// parabola vertex; `time` is the same point in seconds.
struct Extremum {
    double position = 0.0;
    double time = 0.0;
    double value = 0.0;
};

struct ExtremaSet {
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;
    std::size_t zero_crossings = 0;

    [[nodiscard]] std::size_t extrema_count() const noexcept { return maxima.size() + minima.size(); }
};

namespace detail {

/// Vertex of the parabola through (-1, y0), (0, y1), (1, y2).
struct Vertex {
    double offset;
    double value;
};

inline Vertex parabola_vertex(double y0, double y1, double y2) {
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom == 0.0) return {0.0, y1};
    const double offset = 0.5 * (y0 - y2) / denom;
    return {offset, y1 - 0.25 * (y0 - y2) * offset};
}

inline std::size_t count_zero_crossings(std::span<const double> x) {
    std::size_t count = 0;
    int last_sign = 0;
    for (double v : x) {
        const int sign = (v > 0.0) - (v < 0.0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++count;
        last_sign = sign;
    }
    return count;
}

/// Extrema of a raw sequence in sample-index coordinates.
inline void find_extrema(std::span<const double> x, std::vector<Extremum>* maxima,
                         std::vector<Extremum>* minima) {
    const std::size_t n = x.size();
    if (maxima) maxima->clear();
    if (minima) minima->clear();
    if (n < 3) return;
    std::size_t i = 1;
    while (i + 1 < n) {
        // run of equal samples [i, j]
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n) break;
        const double left = x[i - 1];
        const double right = x[j + 1];
        const double v = x[i];
        const bool is_max = v > left && v > right;
        const bool is_min = v < left && v < right;
        if (is_max || is_min) {
            Extremum e;
            if (i == j) {
                const Vertex p = parabola_vertex(left, v, right);
                e.position = static_cast<double>(i) + p.offset;
                e.value = p.value;
            } else {
                // plateau: single extremum at its midpoint
                e.position = 0.5 * static_cast<double>(i + j);
                e.value = v;
            }
            if (is_max && maxima) maxima->push_back(e);
            if (is_min && minima) minima->push_back(e);
        }
        i = j + 1;
    }
}

/// Natural spline second derivatives for knots (xs, ys); Thomas algorithm.
inline std::vector<double> natural_spline_moments(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = xs[i] - xs[i - 1];
        const double h1 = xs[i + 1] - xs[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
    }
    // forward sweep; sub-diagonal entry of row r equals upper[r-1]
    for (std::size_t r = 1; r < k; ++r) {
        const double w = upper[r - 1] / diag[r - 1];
        diag[r] -= w * upper[r - 1];
        rhs[r] -= w * rhs[r - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
    return m;
}

}  // namespace detail

/// Natural cubic spline (zero second derivative at the end knots). Two knots
/// give the straight line; outside the knot span the spline continues linearly.
class CubicSpline {
public:
    CubicSpline(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
        if (xs_.size() != ys_.size()) throw DimensionError("cubic_spline: knot coordinate lengths differ");
        if (xs_.size() < 2) throw ContractError("cubic_spline: need at least 2 knots");
        for (std::size_t i = 1; i < xs_.size(); ++i)
            if (!(xs_[i] > xs_[i - 1])) throw ContractError("cubic_spline: knot times must be strictly increasing");
        m_ = detail::natural_spline_moments(xs_, ys_);
    }

    [[nodiscard]] double operator()(double x) const {
        const std::size_t n = xs_.size();
        std::size_t seg;
        if (x <= xs_.front()) seg = 0;
        else if (x >= xs_.back()) seg = n - 2;
        else seg = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin()) - 1;
        return eval_segment(seg, x);
    }

    /// Evaluates at nondecreasing query points in one sweep.
    [[nodiscard]] std::vector<double> evaluate_sorted(std::span<const double> queries) const {
        std::vector<double> out(queries.size());
        std::size_t seg = 0;
        const std::size_t last = xs_.size() - 2;
        for (std::size_t q = 0; q < queries.size(); ++q) {
            const double x = queries[q];
            while (seg < last && x > xs_[seg + 1]) ++seg;
            out[q] = eval_segment(seg, x);
        }
        return out;
    }

    /// Evaluates at the sample positions 0, 1, ..., count-1.
    [[nodiscard]] std::vector<double> evaluate_grid(std::size_t count) const {
        std::vector<double> out(count);
        std::size_t seg = 0;
        const std::size_t last = xs_.size() - 2;
        for (std::size_t q = 0; q < count; ++q) {
            const double x = static_cast<double>(q);
            while (seg < last && x > xs_[seg + 1]) ++seg;
            out[q] = eval_segment(seg, x);
        }
        return out;
    }

private:
    [[nodiscard]] double eval_segment(std::size_t seg, double x) const {
        const double x0 = xs_[seg], x1 = xs_[seg + 1];
        const double y0 = ys_[seg], y1 = ys_[seg + 1];
        const double h = x1 - x0;
        if (x < x0) {
            const double slope = (y1 - y0) / h - h * (2.0 * m_[seg] + m_[seg + 1]) / 6.0;
            return y0 + slope * (x - x0);
        }
        if (x > x1) {
            const double slope = (y1 - y0) / h + h * (m_[seg] + 2.0 * m_[seg + 1]) / 6.0;
            return y1 + slope * (x - x1);
        }
        const double a = (x1 - x) / h;
        const double b = (x - x0) / h;
        return a * y0 + b * y1 + ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * (h * h) / 6.0;
    }

    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> m_;
};

/// Knots as (time, value) pairs.
struct Knot {
    double time;
    double value;
};

inline std::vector<double> cubic_spline(std::span<const Knot> knots, std::span<const double> query_times) {
    std::vector<double> xs, ys;
    xs.reserve(knots.size());
    ys.reserve(knots.size());
    for (const auto& k : knots) {
        xs.push_back(k.time);
        ys.push_back(k.value);
    }
    const CubicSpline spline(std::move(xs), std::move(ys));
    std::vector<double> out(query_times.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spline(query_times[i]);
    return out;
}

/// Local extrema with parabolic vertex refinement and the zero-crossing count.
inline ExtremaSet find_extrema(const SampledSignal& x) {
    if (x.size() < 3) throw ContractError("find_extrema: need at least 3 samples");
    ExtremaSet set;
    detail::find_extrema(x.samples(), &set.maxima, &set.minima);
    for (auto* list : {&set.maxima, &set.minima})
        for (auto& e : *list) e.time = x.time(e.position);
    set.zero_crossings = detail::count_zero_crossings(x.samples());
    return set;
}

struct EnvelopePair {
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> mean;
};

namespace detail {

/// Spline through the extrema, extended past both ends by mirroring the two
/// nearest extrema about the first and last sample. Evaluated on the sample grid.
inline std::vector<double> mirrored_envelope(std::span<const Extremum> extrema, std::size_t n) {
    const std::size_t m = extrema.size();
    const double last = static_cast<double>(n - 1);
    std::vector<double> xs, ys;
    xs.reserve(m + 4);
    ys.reserve(m + 4);
    for (std::size_t k = std::min<std::size_t>(2, m); k-- > 0;) {
        xs.push_back(-extrema[k].position);
        ys.push_back(extrema[k].value);
    }
    for (const auto& e : extrema) {
        xs.push_back(e.position);
        ys.push_back(e.value);
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(2, m); ++k) {
        xs.push_back(2.0 * last - extrema[m - 1 - k].position);
        ys.push_back(extrema[m - 1 - k].value);
    }
    // An extremum refined onto an end sample would mirror onto itself.
    std::vector<double> ux, uy;
    ux.reserve(xs.size());
    uy.reserve(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!ux.empty() && !(xs[i] > ux.back())) continue;
        ux.push_back(xs[i]);
        uy.push_back(ys[i]);
    }
    return CubicSpline(std::move(ux), std::move(uy)).evaluate_grid(n);
}

/// Upper/lower/mean envelopes of a raw sequence. Throws NotSiftableError when
/// there are fewer than two maxima or two minima.
inline EnvelopePair envelopes(std::span<const double> x, std::vector<Extremum>& maxima,
                              std::vector<Extremum>& minima) {
    find_extrema(x, &maxima, &minima);
    if (maxima.size() < 2 || minima.size() < 2)
        throw NotSiftableError("envelopes: fewer than two maxima or two minima");
    EnvelopePair env;
    env.upper = mirrored_envelope(maxima, x.size());
    env.lower = mirrored_envelope(minima, x.size());
    env.mean.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) env.mean[i] = 0.5 * (env.upper[i] + env.lower[i]);
    return env;
}

}  // namespace detail

/// Cubic-spline upper and lower envelopes through the refined extrema and
/// their pointwise mean.
inline EnvelopePair envelopes(const SampledSignal& x) {
    std::vector<Extremum> maxima, minima;
    return detail::envelopes(x.samples(), maxima, minima);
}

}  // namespace hsa

#endif  // HSA_ENVELOPE_HPP
