#pragma once

// Test-only oracles. Nothing here calls into the library's quadrature, derivative or
// closed-form paths, so expected values computed with these stay independent.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace isodelta::testing {

/// Composite Simpson on [a, b] with n (even) intervals, evaluating f directly.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Bisection root of f on [a, b] (f(a), f(b) of opposite sign).
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a);
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Raw family denominator 1 - (2C + s + 1) s e^{-g|x|} written out from scratch.
inline double raw_denominator(double g, double C, double x, double s) {
    return 1.0 - (2.0 * C + s + 1.0) * s * std::exp(-g * std::abs(x));
}

/// Brute-force scan for sign changes of the denominator on one half-line.
/// `positive` selects x in [0, L] (s = +1, x = 0 taken as the 0+ limit), else [-L, 0].
inline std::vector<double> scan_poles(double g, double C, double L, double step, bool positive) {
    std::vector<double> roots;
    const double s = positive ? 1.0 : -1.0;
    const int n = static_cast<int>(std::llround(L / step));
    double x_prev = 0.0;
    double d_prev = raw_denominator(g, C, 0.0, s);
    if (d_prev == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= n; ++i) {
        const double x = s * i * step;
        const double d = raw_denominator(g, C, x, s);
        if (d == 0.0 || (d_prev != 0.0 && (d < 0) != (d_prev < 0))) {
            roots.push_back(d == 0.0 ? x
                                     : bisect([&](double t) { return raw_denominator(g, C, t, s); },
                                              std::min(x_prev, x), std::max(x_prev, x), 1e-13));
        }
        x_prev = x;
        d_prev = d;
    }
    return roots;
}

/// Harmonic ground state pi^{-1/4} e^{-x^2/2}.
inline double harmonic_psi0(double x) {
    return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
}

/// Analytic bare-delta transmission probability from the jump condition.
inline double delta_transmission(double g, double k) { return 4.0 * k * k / (4.0 * k * k + g * g); }

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240917ULL);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

}  // namespace isodelta::testing
