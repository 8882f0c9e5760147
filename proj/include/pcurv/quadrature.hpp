#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>

namespace pcurv {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 4> kGL8Nodes = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGL8Weights = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <std::invocable<double> F>
double gauss8(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        sum += kGL8Weights[i] * (f(mid - half * kGL8Nodes[i]) + f(mid + half * kGL8Nodes[i]));
    return sum * half;
}

template <std::invocable<double> F>
double composite_gauss8(F&& f, double a, double b, std::int64_t panels) {
    const double w = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::int64_t k = 0; k < panels; ++k)
        sum += gauss8(f, a + static_cast<double>(k) * w, a + static_cast<double>(k + 1) * w);
    return sum;
}

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t panels = 0;
};

/// Composite GL8, doubling the panel count until the relative change drops
/// below rel_tol (with an absolute floor so a zero integral terminates).
template <std::invocable<double> F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, std::int64_t initial_panels = 256,
                                    double rel_tol = 1e-10, int max_doublings = 6) {
    std::int64_t n = initial_panels;
    double prev = composite_gauss8(f, a, b, n);
    for (int i = 0; i < max_doublings; ++i) {
        n *= 2;
        const double cur = composite_gauss8(f, a, b, n);
        const double diff = std::abs(cur - prev);
        if (diff <= rel_tol * std::max(std::abs(cur), 1e-30))
            return {cur, diff, n};
        prev = cur;
    }
    return {prev, std::abs(prev) * rel_tol, n};
}

/// Bisection for a continuous g with g(lo) and g(hi) of opposite sign.
/// Stops when the bracket is below xtol; returns the bracket midpoint.
template <std::invocable<double> F>
double bisect(F&& g, double lo, double hi, double xtol, int max_iter = 200) {
    double glo = g(lo);
    for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo <= 0.0) == (gm <= 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace pcurv
