#ifndef HSA_BESSEL_HPP
#define HSA_BESSEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <vector>

#include "errors.hpp"

namespace hsa {

namespace detail {

/// Ascending power series in long double; accurate for |x| <= 15.
inline double bessel_j_series(unsigned n, double x) {
    const long double half = 0.5L * static_cast<long double>(x);
    long double term = 1.0L;
    for (unsigned k = 1; k <= n; ++k) term *= half / static_cast<long double>(k);
    long double sum = term;
    const long double q = half * half;
    for (unsigned m = 1; m < 500; ++m) {
        term *= -q / (static_cast<long double>(m) * static_cast<long double>(m + n));
        sum += term;
        if (std::abs(term) <= 1e-24L * std::abs(sum) && static_cast<long double>(m) > half) break;
        if (term == 0.0L) break;
    }
    return static_cast<double>(sum);
}

/// Miller's downward recurrence normalized by J0 + 2 sum J_2k = 1.
/// Returns J_0 .. J_nmax at x > 0.
inline std::vector<double> bessel_j_miller(unsigned nmax, double x) {
    const double ax = std::abs(x);
    const auto top_guess = static_cast<unsigned>(std::max<double>(nmax, ax) + 40.0 + 10.0 * std::cbrt(ax));
    const unsigned top = top_guess + (top_guess % 2);
    std::vector<long double> j(top + 2, 0.0L);
    j[top + 1] = 0.0L;
    j[top] = 1.0L;
    long double norm = 2.0L * j[top];
    for (unsigned k = top; k >= 1; --k) {
        j[k - 1] = (2.0L * static_cast<long double>(k) / static_cast<long double>(x)) * j[k] - j[k + 1];
        if (std::abs(j[k - 1]) > 1e300L) {
            for (auto& v : j) v *= 1e-300L;
            norm *= 1e-300L;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0L * j[k - 1];
    }
    norm += j[0];
    std::vector<double> out(nmax + 1);
    for (unsigned k = 0; k <= nmax; ++k) out[k] = static_cast<double>(j[k] / norm);
    return out;
}

}  // namespace detail

/// J_0 .. J_nmax at x: power series for |x| <= 15, Miller recurrence beyond.
inline std::vector<double> bessel_j_orders(unsigned nmax, double x) {
    if (!std::isfinite(x)) throw ContractError("bessel_j: non-finite argument");
    std::vector<double> out(nmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    if (ax <= 15.0) {
        for (unsigned n = 0; n <= nmax; ++n) out[n] = detail::bessel_j_series(n, ax);
    } else {
        out = detail::bessel_j_miller(nmax, ax);
    }
    if (x < 0.0)
        for (unsigned n = 1; n <= nmax; n += 2) out[n] = -out[n];
    return out;
}

/// Bessel function of the first kind J_n(x) for integer n (negative orders by
/// J_{-n} = (-1)^n J_n).
inline double bessel_j(int n, double x) {
    const unsigned an = static_cast<unsigned>(std::abs(n));
    const double v = bessel_j_orders(an, x)[an];
    return (n < 0 && an % 2 == 1) ? -v : v;
}

}  // namespace hsa

#endif  // HSA_BESSEL_HPP
