#pragma once

// Quadrature and finite differences on GridFunction, aware of recorded breaks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "isodelta/grid.hpp"

namespace isodelta {

namespace detail {

/// Cumulative integral of samples v (spacing h), S[0] = 0. Even nodes are composite
/// Simpson; odd nodes split the surrounding Simpson panel with the 3-point quadratic
/// rule, falling back to a trapezoid-weighted split when the quadratic rule would
/// break monotonicity for a one-signed panel.
inline std::vector<double> cumulative_simpson(std::span<const double> v, double h) {
    const std::size_t m = v.size();
    std::vector<double> S(m, 0.0);
    if (m < 2) return S;
    if (m == 2) {
        S[1] = 0.5 * h * (v[0] + v[1]);
        return S;
    }
    auto one_signed = [](double a, double b, double c) {
        return (a >= 0 && b >= 0 && c >= 0) || (a <= 0 && b <= 0 && c <= 0);
    };
    for (std::size_t k = 2; k < m; k += 2) {
        const double a = v[k - 2], b = v[k - 1], c = v[k];
        const double panel = h / 3.0 * (a + 4.0 * b + c);
        double first = h / 12.0 * (5.0 * a + 8.0 * b - c);
        const double second = panel - first;
        if (one_signed(a, b, c) && (first * panel < 0.0 || second * panel < 0.0)) {
            const double w = a + 2.0 * b + c;
            first = w != 0.0 ? panel * (a + b) / w : 0.0;
        }
        if (one_signed(a, b, c))
            first = panel >= 0.0 ? std::clamp(first, 0.0, panel) : std::clamp(first, panel, 0.0);
        S[k - 1] = S[k - 2] + first;
        S[k] = S[k - 2] + panel;
    }
    if (m % 2 == 0) {
        // Odd number of intervals: close the last one with the quadratic through the
        // final three nodes.
        const std::size_t k = m - 1;
        const double a = v[k - 2], b = v[k - 1], c = v[k];
        double last = h / 12.0 * (-a + 8.0 * b + 5.0 * c);
        if (one_signed(a, b, c) && last * (a + b + c) < 0.0) last = 0.5 * h * (b + c);
        S[k] = S[k - 1] + last;
    }
    return S;
}

}  // namespace detail

/// Integral of f from node `start` to every node (negative to the left of start).
/// Each smooth segment between breaks is integrated on its own, using the one-sided
/// limits at its ends. The result keeps a kink marker at every break of f.
inline GridFunction cumulative_from(const GridFunction& f, std::size_t start) {
    const std::size_t n = f.size();
    if (start >= n) throw InvalidInput("integration start outside the grid");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(f.left(i)) || !std::isfinite(f.right(i)))
            throw NonFiniteInput("cumulative integral of a non-finite function (node " +
                                 std::to_string(i) + ")");
    }
    const double h = f.grid().spacing();
    std::vector<double> out(n, 0.0);

    std::vector<std::size_t> fwd{start};
    for (const auto& b : f.breaks())
        if (b.index > start) fwd.push_back(b.index);
    if (fwd.back() != n - 1) fwd.push_back(n - 1);
    for (std::size_t s = 0; s + 1 < fwd.size(); ++s) {
        const std::size_t a = fwd[s], b = fwd[s + 1];
        std::vector<double> seg(b - a + 1);
        for (std::size_t j = 0; j < seg.size(); ++j) seg[j] = f[a + j];
        seg.front() = f.right(a);
        seg.back() = f.left(b);
        const auto S = detail::cumulative_simpson(seg, h);
        for (std::size_t j = 1; j < seg.size(); ++j) out[a + j] = out[a] + S[j];
    }

    std::vector<std::size_t> bwd{start};
    for (auto it = f.breaks().rbegin(); it != f.breaks().rend(); ++it)
        if (it->index < start) bwd.push_back(it->index);
    if (bwd.back() != 0) bwd.push_back(0);
    if (start == 0) bwd.resize(1);
    for (std::size_t s = 0; s + 1 < bwd.size(); ++s) {
        const std::size_t a = bwd[s], b = bwd[s + 1];
        std::vector<double> seg(a - b + 1);
        for (std::size_t j = 0; j < seg.size(); ++j) seg[j] = f[a - j];
        seg.front() = f.left(a);
        seg.back() = f.right(b);
        const auto S = detail::cumulative_simpson(seg, h);
        for (std::size_t j = 1; j < seg.size(); ++j) out[a - j] = out[a] - S[j];
    }

    std::vector<Break> kinks;
    for (const auto& b : f.breaks()) kinks.push_back({b.index, out[b.index], out[b.index]});
    return GridFunction(f.grid(), std::move(out), std::move(kinks));
}

/// Integral of f over the whole grid.
inline double integrate(const GridFunction& f) { return cumulative_from(f, 0)[f.size() - 1]; }

namespace detail {

inline bool stencil_singular(const GridFunction& f, std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j <= hi; ++j)
        if (f.is_singular(j)) return true;
    return false;
}

}  // namespace detail

/// First derivative: 2nd-order central differences, 2nd-order one-sided stencils at the
/// grid ends and on each side of a break.
inline GridFunction derivative(const GridFunction& f) {
    const std::size_t n = f.size();
    const double h = f.grid().spacing();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> d(n);
    std::vector<Break> breaks;
    std::vector<std::size_t> singular;

    auto fwd = [&](std::size_t i, double fi) {
        return (-3.0 * fi + 4.0 * f.seen_from(i + 1, i) - f.seen_from(i + 2, i)) / (2.0 * h);
    };
    auto bwd = [&](std::size_t i, double fi) {
        return (3.0 * fi - 4.0 * f.seen_from(i - 1, i) + f.seen_from(i - 2, i)) / (2.0 * h);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0, hi = std::min(n - 1, i + 2);
        if (f.has_singular_nodes() && detail::stencil_singular(f, lo, hi)) {
            d[i] = nan;
            singular.push_back(i);
            continue;
        }
        if (const Break* b = f.find_break(i)) {
            breaks.push_back({i, bwd(i, b->left), fwd(i, b->right)});
            d[i] = 0.5 * (breaks.back().left + breaks.back().right);
        } else if (i == 0) {
            d[i] = fwd(i, f[i]);
        } else if (i == n - 1) {
            d[i] = bwd(i, f[i]);
        } else {
            d[i] = (f.seen_from(i + 1, i) - f.seen_from(i - 1, i)) / (2.0 * h);
        }
    }
    return GridFunction(f.grid(), std::move(d), std::move(breaks), std::move(singular));
}

/// Second derivative: 3-point central stencil, 4-point 2nd-order one-sided stencils at
/// the grid ends and on each side of a break.
inline GridFunction second_derivative(const GridFunction& f) {
    const std::size_t n = f.size();
    if (n < 4) throw InvalidInput("second derivative needs at least 4 nodes");
    const double h2 = f.grid().spacing() * f.grid().spacing();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> d(n);
    std::vector<Break> breaks;
    std::vector<std::size_t> singular;

    auto fwd = [&](std::size_t i, double fi) {
        return (2.0 * fi - 5.0 * f.seen_from(i + 1, i) + 4.0 * f.seen_from(i + 2, i) -
                f.seen_from(i + 3, i)) / h2;
    };
    auto bwd = [&](std::size_t i, double fi) {
        return (2.0 * fi - 5.0 * f.seen_from(i - 1, i) + 4.0 * f.seen_from(i - 2, i) -
                f.seen_from(i - 3, i)) / h2;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 3 ? i - 3 : 0, hi = std::min(n - 1, i + 3);
        if (f.has_singular_nodes() && detail::stencil_singular(f, lo, hi)) {
            d[i] = nan;
            singular.push_back(i);
            continue;
        }
        if (const Break* b = f.find_break(i)) {
            breaks.push_back({i, bwd(i, b->left), fwd(i, b->right)});
            d[i] = 0.5 * (breaks.back().left + breaks.back().right);
        } else if (i == 0) {
            d[i] = fwd(i, f[i]);
        } else if (i == n - 1) {
            d[i] = bwd(i, f[i]);
        } else {
            d[i] = (f.seen_from(i - 1, i) - 2.0 * f[i] + f.seen_from(i + 1, i)) / h2;
        }
    }
    return GridFunction(f.grid(), std::move(d), std::move(breaks), std::move(singular));
}

}  // namespace isodelta
