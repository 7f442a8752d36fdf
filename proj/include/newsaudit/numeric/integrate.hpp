#pragma once

#include <cmath>
#include <functional>

#include "newsaudit/core/error.hpp"

namespace newsaudit::numeric {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw NumericalError("adaptive quadrature did not converge to the requested tolerance");
    // keep the per-level tolerance above roundoff so noise-limited segments
    // terminate instead of recursing to the depth limit
    const double child_tol =
        std::max(0.5 * tol, 4e-16 * (std::fabs(left) + std::fabs(right) + 1e-3));
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, child_tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, child_tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson with absolute tolerance. Throws NumericalError instead of
// returning a poor estimate when the recursion depth is exhausted.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Fixed-order Gauss-Legendre nodes/weights on [-1, 1], computed once by
// Newton iteration on the Legendre recurrence.
template <int N>
struct GaussLegendre {
    std::array<double, N> node{};
    std::array<double, N> weight{};

    GaussLegendre() {
        for (int i = 0; i < (N + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            node[i] = -x;
            node[N - 1 - i] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            weight[i] = w;
            weight[N - 1 - i] = w;
        }
    }

    template <class F>
    double integrate(const F& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double acc = 0.0;
        for (int i = 0; i < N; ++i) acc += weight[i] * f(mid + half * node[i]);
        return half * acc;
    }
};

template <class F>
double integrate_gl64(const F& f, double a, double b) {
    static const GaussLegendre<64> rule;
    return rule.integrate(f, a, b);
}

} // namespace newsaudit::numeric
