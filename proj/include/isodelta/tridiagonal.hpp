#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "isodelta/errors.hpp"

namespace isodelta {

/// Real symmetric tridiagonal matrix: diag (n), off (n-1).
struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }
};

/// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
inline std::size_t sturm_count(const SymmetricTridiagonal& t, double x) {
    const std::size_t n = t.size();
    const double tiny = std::numeric_limits<double>::min() * 4.0;
    std::size_t count = 0;
    double q = t.diag[0] - x;
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
        if (i + 1 == n) break;
        q = (t.diag[i + 1] - x) - t.off[i] * t.off[i] / q;
    }
    return count;
}

/// Gershgorin interval containing the spectrum.
inline std::pair<double, double> gershgorin_bounds(const SymmetricTridiagonal& t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(t.off[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    return {lo, hi};
}

/// k-th smallest eigenvalue (k = 0 is the lowest) by bisection on the Sturm count,
/// stopped when the bracket is narrower than tol.
inline double kth_eigenvalue(const SymmetricTridiagonal& t, std::size_t k, double tol = 1e-10) {
    if (t.size() == 0 || t.off.size() + 1 != t.size())
        throw InvalidInput("malformed tridiagonal matrix");
    if (k >= t.size()) throw InvalidInput("eigenvalue index out of range");
    auto [lo, hi] = gershgorin_bounds(t);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Eigenvector for an (approximate) eigenvalue by inverse iteration, normalized to
/// unit Euclidean length. Uses the LDL^T (Thomas) solve; the shift sits just below
/// lambda, so for the lowest eigenvalue the shifted matrix is positive definite.
inline std::vector<double> inverse_iteration(const SymmetricTridiagonal& t, double lambda,
                                             int iterations = 3) {
    const std::size_t n = t.size();
    const double shift = lambda - 1e-8 * std::max(1.0, std::abs(lambda));
    std::vector<double> v(n, 1.0), c(n), d(n);
    for (int it = 0; it < iterations; ++it) {
        // forward sweep
        double denom = t.diag[0] - shift;
        c[0] = n > 1 ? t.off[0] / denom : 0.0;
        d[0] = v[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = (t.diag[i] - shift) - t.off[i - 1] * c[i - 1];
            if (denom == 0.0) denom = std::numeric_limits<double>::epsilon();
            c[i] = i + 1 < n ? t.off[i] / denom : 0.0;
            d[i] = (v[i] - t.off[i - 1] * d[i - 1]) / denom;
        }
        v[n - 1] = d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) v[i] = d[i] - c[i] * v[i + 1];
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

}  // namespace isodelta
