#pragma once

// Independent numerical checks for potentials g*delta(x) + tail(x):
//  * lowest bound state from the 3-point finite-difference Hamiltonian (delta as a
//    g/h diagonal spike at the origin node), Sturm bisection on the tridiagonal matrix;
//  * the same energy by shooting with RK4 from both walls and the explicit jump
//    condition psi'(0+) - psi'(0-) = g psi(0);
//  * reflection/transmission amplitudes by integrating an outgoing wave leftwards.
// Walls at x_min and x_max are hard (psi = 0).

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "isodelta/calculus.hpp"
#include "isodelta/errors.hpp"
#include "isodelta/grid.hpp"
#include "isodelta/potential.hpp"
#include "isodelta/tridiagonal.hpp"

namespace isodelta {

struct SpectralReport {
    /// Finite-difference energy with the diagonal-spike delta.
    double energy{};
    /// Same discretization on every other node (spacing 2h), when the grid allows it.
    std::optional<double> energy_coarse;
    /// (4 E_h - E_2h) / 3.
    std::optional<double> energy_richardson;
    /// Shooting energy with the explicit jump condition.
    double energy_shooting{};
    int node_count{};
    /// Residuals of the shooting eigenfunction, measured with finite differences.
    double ode_residual{};
    double jump_residual{};
    Grid grid;
    /// Finite-difference eigenvector on all nodes (zero at the walls), unit max-norm.
    GridFunction state;
};

struct ScatteringResult {
    double k{};
    std::complex<double> R;
    std::complex<double> T;

    double reflection() const noexcept { return std::norm(R); }
    double transmission() const noexcept { return std::norm(T); }
    double flux() const noexcept { return std::norm(R) + std::norm(T); }
};

struct EigenfunctionResidual {
    double ode_residual{};
    double jump_residual{};
};

namespace detail {

inline void require_regular(const SingularPotential& v) {
    if (v.tail.has_singular_nodes()) throw InvalidInput("potential has flagged pole nodes");
    if (v.delta_strength != 0.0 && !v.grid().origin_index())
        throw InvalidInput("a delta term needs a grid node at x = 0");
}

inline SymmetricTridiagonal fd_hamiltonian(const SingularPotential& v) {
    const Grid& grid = v.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    SymmetricTridiagonal t;
    t.diag.resize(n - 2);
    t.off.assign(n - 3, -inv_h2);
    for (std::size_t i = 1; i + 1 < n; ++i) t.diag[i - 1] = 2.0 * inv_h2 + v.tail[i];
    if (auto o = grid.origin_index(); o && *o > 0 && *o + 1 < n)
        t.diag[*o - 1] += v.delta_strength / h;
    return t;
}

inline double fd_lowest(const SingularPotential& v) { return kth_eigenvalue(fd_hamiltonian(v), 0); }

}  // namespace detail

/// Bottom of the continuum: the smaller of the tail values at the two walls (0 for a
/// decaying tail). A state is bound only below it.
inline double continuum_threshold(const SingularPotential& v) {
    return std::min(v.tail[0], v.tail[v.tail.size() - 1]);
}

namespace detail {

template <class T>
struct OdeState {
    T psi;
    T dpsi;
};

/// One RK4 step of psi'' = (V - E) psi with signed step dx; V at start, midpoint, end.
template <class T>
OdeState<T> rk4_step(OdeState<T> y, double dx, double v0, double vm, double v1, T energy) {
    auto f = [&](const OdeState<T>& s, double v) {
        return OdeState<T>{s.dpsi, (v - energy) * s.psi};
    };
    auto add = [](const OdeState<T>& a, const OdeState<T>& b, double c) {
        return OdeState<T>{a.psi + c * b.psi, a.dpsi + c * b.dpsi};
    };
    const auto k1 = f(y, v0);
    const auto k2 = f(add(y, k1, 0.5 * dx), vm);
    const auto k3 = f(add(y, k2, 0.5 * dx), vm);
    const auto k4 = f(add(y, k3, dx), v1);
    return {y.psi + dx / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi),
            y.dpsi + dx / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi)};
}

/// Tail samples on one closed half [lo, hi] of the grid, with one-sided limits at the
/// ends, plus 4-point interpolated midpoints of every interval.
struct HalfLineTail {
    std::size_t lo{};
    std::vector<double> node;
    std::vector<double> mid;
};

inline HalfLineTail half_line_tail(const GridFunction& tail, std::size_t lo, std::size_t hi) {
    HalfLineTail out{lo, {}, {}};
    const std::size_t m = hi - lo + 1;
    if (m < 4) throw InvalidInput("half-line too short for the shooting integrator");
    out.node.resize(m);
    for (std::size_t j = 0; j < m; ++j) out.node[j] = tail[lo + j];
    out.node.front() = tail.right(lo);
    out.node.back() = tail.left(hi);
    out.mid.resize(m - 1);
    const auto& f = out.node;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        if (j == 0)
            out.mid[j] = (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
        else if (j + 2 == m)
            out.mid[j] = (f[j - 2] - 5.0 * f[j - 1] + 15.0 * f[j] + 5.0 * f[j + 1]) / 16.0;
        else
            out.mid[j] = (-f[j - 1] + 9.0 * f[j] + 9.0 * f[j + 1] - f[j + 2]) / 16.0;
    }
    return out;
}

/// Integrates across a half from one end to the other. Returns the state at every
/// node of the half (ascending x). When `rescale` is set the running solution is
/// rescaled to avoid overflow (the shape is preserved).
template <class T>
std::vector<OdeState<T>> integrate_half(const HalfLineTail& half, double h, OdeState<T> start,
                                        bool from_high_end, T energy, bool rescale) {
    const std::size_t m = half.node.size();
    std::vector<OdeState<T>> out(m);
    OdeState<T> y = start;
    if (from_high_end) {
        out[m - 1] = y;
        for (std::size_t j = m - 1; j > 0; --j) {
            y = rk4_step(y, -h, half.node[j], half.mid[j - 1], half.node[j - 1], energy);
            out[j - 1] = y;
            if (rescale && std::abs(y.psi) + std::abs(y.dpsi) > 1e100) {
                for (std::size_t k = j - 1; k < m; ++k) {
                    out[k].psi *= 1e-100;
                    out[k].dpsi *= 1e-100;
                }
                y = out[j - 1];
            }
        }
    } else {
        out[0] = y;
        for (std::size_t j = 0; j + 1 < m; ++j) {
            y = rk4_step(y, h, half.node[j], half.mid[j], half.node[j + 1], energy);
            out[j + 1] = y;
            if (rescale && std::abs(y.psi) + std::abs(y.dpsi) > 1e100) {
                for (std::size_t k = 0; k <= j + 1; ++k) {
                    out[k].psi *= 1e-100;
                    out[k].dpsi *= 1e-100;
                }
                y = out[j + 1];
            }
        }
    }
    return out;
}

/// Matching node for shooting: the origin, or the middle node for a delta-free potential.
inline std::size_t matching_node(const SingularPotential& v) {
    if (auto o = v.grid().origin_index(); o && *o >= 3 && *o + 4 <= v.grid().size()) return *o;
    if (v.delta_strength != 0.0) throw InvalidInput("origin node too close to a wall");
    return v.grid().size() / 2;
}

struct ShootingSolution {
    std::vector<OdeState<double>> left;   // nodes 0..match
    std::vector<OdeState<double>> right;  // nodes match..n-1
};

inline ShootingSolution shoot(const SingularPotential& v, const HalfLineTail& lh,
                              const HalfLineTail& rh, double energy) {
    const double h = v.grid().spacing();
    return {integrate_half<double>(lh, h, {0.0, 1.0}, false, energy, true),
            integrate_half<double>(rh, h, {0.0, -1.0}, true, energy, true)};
}

/// Scale-free Wronskian mismatch of the jump condition at the matching node.
inline double jump_mismatch(const ShootingSolution& s, double g) {
    const auto& L = s.left.back();
    const auto& R = s.right.front();
    const double w = R.dpsi * L.psi - L.dpsi * R.psi - g * L.psi * R.psi;
    return w / std::sqrt((L.psi * L.psi + L.dpsi * L.dpsi) * (R.psi * R.psi + R.dpsi * R.dpsi));
}

}  // namespace detail

/// Residuals of a claimed eigenfunction:
///   ode  = max over off-origin interior nodes of |-psi'' + tail psi - E psi| / max|psi|
///   jump = |psi'(0+) - psi'(0-) - g psi(0)| / |psi(0)|  (0 when the grid has no origin)
inline EigenfunctionResidual eigenfunction_residual(const SingularPotential& v,
                                                    const GridFunction& psi, double E) {
    if (!(psi.grid() == v.grid())) throw InvalidInput("state and potential grids differ");
    const double scale = max_abs(psi);
    if (!(scale > 0.0)) throw InvalidInput("state vanishes identically");
    const auto d2 = second_derivative(psi);
    const auto origin = v.grid().origin_index();
    EigenfunctionResidual r;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
        if (origin && *origin == i) continue;
        if (psi.is_singular(i) || d2.is_singular(i)) continue;
        const double res = -d2[i] + v.tail[i] * psi[i] - E * psi[i];
        r.ode_residual = std::max(r.ode_residual, std::abs(res) / scale);
    }
    if (origin && *origin >= 2 && *origin + 2 < psi.size()) {
        const std::size_t o = *origin;
        const double h = v.grid().spacing();
        const double p0l = psi.left(o), p0r = psi.right(o);
        const double dl = (3.0 * p0l - 4.0 * psi[o - 1] + psi[o - 2]) / (2.0 * h);
        const double dr = (-3.0 * p0r + 4.0 * psi[o + 1] - psi[o + 2]) / (2.0 * h);
        const double p0 = 0.5 * (p0l + p0r);
        if (p0 == 0.0) throw InvalidInput("state vanishes at the origin");
        r.jump_residual = std::abs(dr - dl - v.delta_strength * p0) / std::abs(p0);
    }
    return r;
}

/// Lowest eigenvalue of the finite-difference Hamiltonian (spike realization of the
/// delta). Throws NoBoundState when it is not below the continuum threshold.
inline double fd_ground_energy(const SingularPotential& v) {
    detail::require_regular(v);
    const double e = detail::fd_lowest(v);
    if (!(e < continuum_threshold(v))) throw NoBoundState(e);
    return e;
}

/// Shooting energy with the jump condition, searched around `guess`.
inline double shooting_ground_energy(const SingularPotential& v, double guess) {
    detail::require_regular(v);
    const std::size_t m = detail::matching_node(v);
    const auto lh = detail::half_line_tail(v.tail, 0, m);
    const auto rh = detail::half_line_tail(v.tail, m, v.grid().size() - 1);
    const double g = m == v.grid().origin_index().value_or(v.grid().size()) ? v.delta_strength : 0.0;
    auto F = [&](double e) { return detail::jump_mismatch(detail::shoot(v, lh, rh, e), g); };

    double step = 1e-4 * std::max(1.0, std::abs(guess));
    double a = guess - step, b = guess + step;
    double fa = F(a), fb = F(b);
    for (int i = 0; i < 60 && fa * fb > 0.0; ++i) {
        step *= 2.0;
        a = guess - step;
        b = guess + step;
        fa = F(a);
        fb = F(b);
    }
    if (fa * fb > 0.0) throw NonConvergent("shooting could not bracket the ground state");
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(
        F, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(48), iters);
    return 0.5 * (lo + hi);
}

/// Full report: spike and jump-condition energies, Richardson pair, node count and the
/// residuals of the shooting eigenfunction.
inline SpectralReport ground_state_energy(const SingularPotential& v) {
    detail::require_regular(v);
    const Grid& grid = v.grid();
    const auto H = detail::fd_hamiltonian(v);
    const double e = kth_eigenvalue(H, 0);
    if (!(e < continuum_threshold(v))) throw NoBoundState(e);

    std::optional<double> coarse, richardson;
    if (auto tail2 = subsample(v.tail); tail2 && (v.delta_strength == 0.0 || tail2->grid().origin_index())) {
        coarse = detail::fd_lowest({v.delta_strength, *tail2});
        richardson = (4.0 * e - *coarse) / 3.0;
    }

    const auto vec = inverse_iteration(H, e);
    std::vector<double> full(grid.size(), 0.0);
    double vmax = 0.0;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        full[i + 1] = vec[i];
        if (std::abs(vec[i]) > std::abs(vmax)) vmax = vec[i];
    }
    for (double& x : full) x /= vmax;
    int nodes = 0;
    double last = 0.0;
    for (double x : full) {
        if (std::abs(x) < 1e-8) continue;
        if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++nodes;
        last = x;
    }

    const double e_shoot = shooting_ground_energy(v, e);
    const std::size_t m = detail::matching_node(v);
    const auto lh = detail::half_line_tail(v.tail, 0, m);
    const auto rh = detail::half_line_tail(v.tail, m, grid.size() - 1);
    const auto sol = detail::shoot(v, lh, rh, e_shoot);
    // Scale the left branch so both meet at the matching node, then normalize.
    const double ratio = sol.right.front().psi / sol.left.back().psi;
    std::vector<double> psi(grid.size());
    for (std::size_t i = 0; i <= m; ++i) psi[i] = ratio * sol.left[i].psi;
    for (std::size_t i = m; i < grid.size(); ++i) psi[i] = sol.right[i - m].psi;
    double pmax = 0.0;
    for (double x : psi)
        if (std::abs(x) > std::abs(pmax)) pmax = x;
    for (double& x : psi) x /= pmax;
    std::vector<Break> kink;
    if (m >= GridFunction::kBreakMargin && m + GridFunction::kBreakMargin < grid.size())
        kink.push_back({m, psi[m], psi[m]});
    const GridFunction shot(grid, std::move(psi), std::move(kink));
    const auto res = eigenfunction_residual(v, shot, e_shoot);

    return {e,     coarse,           richardson,        e_shoot, nodes,
            res.ode_residual, res.jump_residual, grid, GridFunction(grid, std::move(full))};
}

/// Reflection and transmission for a wave incident from the left with energy k^2.
/// Integrates the outgoing solution e^{ikx} from x_max to x_min (RK4, analytic jump
/// at the origin) and matches A e^{ikx} + B e^{-ikx} at the two leftmost nodes.
inline ScatteringResult scattering(const SingularPotential& v, double k) {
    detail::require_regular(v);
    const Grid& grid = v.grid();
    const double h = grid.spacing();
    if (!(k > 0.0)) throw InvalidInput("wavenumber must be positive");
    if (!(k * h < 0.1))
        throw NonConvergent("step too large for k: need k*h < 0.1, got " + std::to_string(k * h));
    const std::size_t n = grid.size();
    constexpr double kEdgeTolerance = 1e-8;
    if (std::abs(v.tail[0]) > kEdgeTolerance || std::abs(v.tail[n - 1]) > kEdgeTolerance)
        throw InvalidInput("potential tail is not negligible at the grid edges");

    using cplx = std::complex<double>;
    const cplx I(0.0, 1.0);
    const cplx energy(k * k, 0.0);
    const auto origin = grid.origin_index();
    const std::size_t m = origin && *origin >= 3 && *origin + 4 <= n ? *origin : n / 2;
    const double g = (origin && m == *origin) ? v.delta_strength : 0.0;
    if (v.delta_strength != 0.0 && g == 0.0) throw InvalidInput("origin node too close to a wall");

    const auto rh = detail::half_line_tail(v.tail, m, n - 1);
    const auto lh = detail::half_line_tail(v.tail, 0, m);
    const double xr = grid.x_max();
    const cplx start = std::exp(I * k * xr);
    const auto right =
        detail::integrate_half<cplx>(rh, h, {start, I * k * start}, true, energy, false);
    auto at0 = right.front();
    at0.dpsi -= g * at0.psi;
    const auto left = detail::integrate_half<cplx>(lh, h, at0, true, energy, false);

    const double x0 = grid.x(0), x1 = grid.x(1);
    const cplx p0 = left[0].psi, p1 = left[1].psi;
    const cplx e0p = std::exp(I * k * x0), e0m = std::exp(-I * k * x0);
    const cplx e1p = std::exp(I * k * x1), e1m = std::exp(-I * k * x1);
    const cplx det = e0p * e1m - e0m * e1p;
    const cplx A = (p0 * e1m - e0m * p1) / det;
    const cplx B = (e0p * p1 - p0 * e1p) / det;
    return {k, B / A, 1.0 / A};
}

}  // namespace isodelta
