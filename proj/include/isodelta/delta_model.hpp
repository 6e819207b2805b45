#pragma once

// Closed forms for the strictly isospectral family of the attractive delta potential
// g*delta(x), g < 0, in units where hbar^2/2m = 1 (H = -d^2/dx^2 + g*delta(x)).
//
// With s = sign(x), E = exp(g|x|) (decaying) and script-C = 2C + s + 1:
//   psi0(x)  = sqrt(-g/2) exp(g|x|/2)
//   I(x)     = -s E/2 + s/2 + 1/2                    (cumulative norm of psi0)
//   tail(x)  = 2 g^2 cC s E / (E - cC s)^2            (family tail, smooth off 0)
//   psi_iso  = -sqrt(-2g) N s sqrt(E) / (E - cC s)    (N = sqrt(C(C+1)) or 1)
// The E-scaled forms are algebraically identical to the e^{-g|x|} forms and do not
// overflow for large |x|. Poles are the zeros of 1 - cC s exp(-g|x|).

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "isodelta/errors.hpp"
#include "isodelta/grid.hpp"
#include "isodelta/parameter.hpp"
#include "isodelta/potential.hpp"
#include "isodelta/susy_core.hpp"

namespace isodelta {

/// Attractive coupling strength, g < 0.
class DeltaCoupling {
public:
    explicit DeltaCoupling(double g) : g_(g) {
        if (!(g < 0.0) || !std::isfinite(g))
            throw InvalidInput("delta coupling must be attractive (g < 0), got " +
                               std::to_string(g));
    }
    double value() const noexcept { return g_; }

private:
    double g_;
};

/// sign(x), with the side deciding at x = 0.
constexpr double side_sign(double x, Side side) noexcept {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return side == Side::Right ? 1.0 : -1.0;
}

constexpr Side side_of(double x) noexcept { return x < 0.0 ? Side::Left : Side::Right; }

/// script-C = 2C + sign(x) + 1, constant on each half-line.
struct ScriptC {
    double C{};

    constexpr double value_pos() const noexcept { return 2.0 * C + 2.0; }
    constexpr double value_neg() const noexcept { return 2.0 * C; }
    constexpr double at(double x, Side side) const noexcept {
        return side_sign(x, side) > 0.0 ? value_pos() : value_neg();
    }
};

inline double bound_energy(DeltaCoupling g) { return -0.25 * g.value() * g.value(); }

inline double ground_state_delta(DeltaCoupling g, double x) {
    return std::sqrt(-0.5 * g.value()) * std::exp(0.5 * g.value() * std::abs(x));
}

/// Cumulative probability of psi0 from -infinity to x. Continuous, I(0) = 1/2.
inline double cumulative_I(DeltaCoupling g, double x) {
    if (x == 0.0) return 0.5;
    const double s = x > 0.0 ? 1.0 : -1.0;
    return -0.5 * s * std::exp(g.value() * std::abs(x)) + 0.5 * s + 0.5;
}

/// 1 - script-C * sign(x) * exp(-g|x|); its zeros are the poles of the family.
inline double family_denominator(DeltaCoupling g, double C, double x, Side side) {
    const double s = side_sign(x, side);
    return 1.0 - ScriptC{C}.at(x, side) * s * std::exp(-g.value() * std::abs(x));
}

namespace detail {

inline double iso_tail_unchecked(double g, double C, double x, Side side) {
    const double s = side_sign(x, side);
    const double cc = ScriptC{C}.at(x, side);
    const double E = std::exp(g * std::abs(x));
    const double den = E - cc * s;
    return 2.0 * g * g * cc * s * E / (den * den);
}

inline double iso_wavefunction_unchecked(double g, double C, double x, Side side, double norm) {
    const double s = side_sign(x, side);
    const double cc = ScriptC{C}.at(x, side);
    const double E = std::exp(g * std::abs(x));
    return -std::sqrt(-2.0 * g) * norm * s * std::sqrt(E) / (E - cc * s);
}

}  // namespace detail

/// Smooth part of the family member; the full potential is g*delta(x) + iso_tail.
/// Has a finite jump at x = 0, so the side selects the limit there.
inline double iso_tail(DeltaCoupling g, double C, double x, Side side) {
    const double v = detail::iso_tail_unchecked(g.value(), C, x, side);
    if (!std::isfinite(v)) throw Singular(x);
    return v;
}

/// Off the origin the side follows sign(x); at x = 0 the mean of both limits.
inline double iso_tail(DeltaCoupling g, double C, double x) {
    if (x != 0.0) return iso_tail(g, C, x, side_of(x));
    return 0.5 * (iso_tail(g, C, 0.0, Side::Left) + iso_tail(g, C, 0.0, Side::Right));
}

/// Ground state of the family member. Continuous at 0 for regular C; the global sign
/// is a phase choice, comparisons should use magnitudes.
inline double iso_wavefunction(DeltaCoupling g, double C, double x, bool normalized,
                               Side side) {
    const double norm = normalized ? normalization_constant(IsoParameter::of(C)) : 1.0;
    const double v = detail::iso_wavefunction_unchecked(g.value(), C, x, side, norm);
    if (!std::isfinite(v)) throw Singular(x);
    return v;
}

inline double iso_wavefunction(DeltaCoupling g, double C, double x, bool normalized) {
    return iso_wavefunction(g, C, x, normalized, side_of(x));
}

inline IsoParameter classify_parameter(double C) { return IsoParameter::of(C); }

// ---------------------------------------------------------------------------
// Singularities

struct SingularityLocation {
    double x{};
    Side half_line{Side::Right};
};

struct SingularityReport {
    std::vector<SingularityLocation> locations;
    SingularBand parameter_band{SingularBand::None};
};

namespace detail {

/// Newton polish of a closed-form root of the family denominator on one half-line.
inline double refine_pole(DeltaCoupling g, double C, double guess, Side side) {
    const double s = side == Side::Right ? 1.0 : -1.0;
    const double cc = ScriptC{C}.at(s, side);
    // On the half-line |x| = s*x, so d/dx exp(-g|x|) = -g*s*exp(-g|x|).
    auto f = [&](double x) {
        const double e = std::exp(-g.value() * std::abs(x));
        return std::make_tuple(1.0 - cc * s * e, cc * g.value() * e);
    };
    const double lo = side == Side::Right ? 0.0 : guess - 1.0;
    const double hi = side == Side::Right ? guess + 1.0 : 0.0;
    std::uintmax_t iters = 50;
    return boost::math::tools::newton_raphson_iterate(f, guess, lo, hi,
                                                      std::numeric_limits<double>::digits - 4,
                                                      iters);
}

}  // namespace detail

/// Poles of the family member inside the search domain, located analytically per
/// half-line and polished with Newton iterations.
///   x > 0: exp(-g x) = 1/(2C+2), needs 0 < 2(C+1) <= 1
///   x < 0: exp(-g|x|) = -1/(2C),  needs 0 < -2C <= 1
inline SingularityReport singularity_scan(DeltaCoupling g, double C, const Grid& search_domain) {
    SingularityReport report;
    report.parameter_band = singular_band(C);
    const double pos = 2.0 * (C + 1.0);
    if (pos > 0.0 && pos <= 1.0) {
        const double guess = std::log(pos) / g.value();
        const double x = detail::refine_pole(g, C, guess, Side::Right);
        if (x <= search_domain.x_max() && x >= search_domain.x_min())
            report.locations.push_back({x, Side::Right});
    }
    const double neg = -2.0 * C;
    if (neg > 0.0 && neg <= 1.0) {
        const double guess = -std::log(neg) / g.value();
        const double x = detail::refine_pole(g, C, guess, Side::Left);
        if (x >= search_domain.x_min() && x <= search_domain.x_max())
            report.locations.push_back({x, Side::Left});
    }
    return report;
}

/// Grid nodes bracketing each pole (a single node when the pole sits on it).
inline std::vector<Bracket> pole_brackets(const SingularityReport& report, const Grid& grid) {
    std::vector<Bracket> out;
    const double h = grid.spacing();
    for (const auto& loc : report.locations) {
        const double r = (loc.x - grid.x_min()) / h;
        const auto nearest = grid.nearest(loc.x);
        if (std::abs(grid.x(nearest) - loc.x) <= 1e-12 * std::max(1.0, std::abs(loc.x))) {
            out.push_back({nearest, nearest, grid.x(nearest), grid.x(nearest)});
            continue;
        }
        const auto lo = static_cast<std::size_t>(std::floor(r));
        const auto hi = std::min(lo + 1, grid.size() - 1);
        out.push_back({lo, hi, grid.x(lo), grid.x(hi)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sampled forms

inline GridFunction sample_ground_state(DeltaCoupling g, const Grid& grid) {
    return sample_sided(grid, [g](double x, Side) { return ground_state_delta(g, x); });
}

inline GridFunction sample_cumulative_I(DeltaCoupling g, const Grid& grid) {
    return sample_sided(grid, [g](double x, Side) { return cumulative_I(g, x); });
}

namespace detail {

template <class F>
GridFunction sample_family(DeltaCoupling g, double C, const Grid& grid, bool allow_singular,
                           F&& f) {
    const auto brackets = pole_brackets(singularity_scan(g, C, grid), grid);
    if (!brackets.empty() && !allow_singular) throw SingularFamilyMember(C, brackets);
    auto nodes = bracket_nodes(brackets);
    // Fill raw values first; flagged nodes are replaced by NaN before validation.
    std::vector<double> v(grid.size());
    std::vector<Break> breaks;
    const auto origin = grid.origin_index();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid.x(i);
        if (origin && *origin == i && i >= GridFunction::kBreakMargin &&
            i + GridFunction::kBreakMargin < grid.size()) {
            breaks.push_back({i, f(0.0, Side::Left), f(0.0, Side::Right)});
            v[i] = 0.5 * (breaks.back().left + breaks.back().right);
        } else {
            v[i] = f(x, (origin && *origin == i && i == 0) ? Side::Right : side_of(x));
        }
        if (!std::isfinite(v[i]) && allow_singular) nodes.push_back(i);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto i : nodes) {
        v[i] = nan;
        for (auto& b : breaks)
            if (b.index == i) b.left = b.right = nan;
    }
    return GridFunction(grid, std::move(v), std::move(breaks), std::move(nodes));
}

}  // namespace detail

/// Family tail on the grid; poles inside the domain are errors unless allow_singular,
/// in which case their bracketing nodes are flagged NaN.
inline GridFunction sample_iso_tail(DeltaCoupling g, double C, const Grid& grid,
                                    bool allow_singular = false) {
    return detail::sample_family(g, C, grid, allow_singular, [&](double x, Side side) {
        return detail::iso_tail_unchecked(g.value(), C, x, side);
    });
}

inline GridFunction sample_iso_wavefunction(DeltaCoupling g, double C, const Grid& grid,
                                            bool normalized, bool allow_singular = false) {
    const double norm = normalized ? normalization_constant(IsoParameter::of(C)) : 1.0;
    return detail::sample_family(g, C, grid, allow_singular, [&](double x, Side side) {
        return detail::iso_wavefunction_unchecked(g.value(), C, x, side, norm);
    });
}

/// g*delta(x) + iso_tail as a potential on the grid. The delta strength is untouched
/// by the Darboux deformation.
inline SingularPotential family_member(DeltaCoupling g, double C, const Grid& grid,
                                       bool allow_singular = false) {
    return {g.value(), sample_iso_tail(g, C, grid, allow_singular)};
}

inline SingularPotential bare_delta(DeltaCoupling g, const Grid& grid) {
    return {g.value(), sample(grid, [](double) { return 0.0; })};
}

}  // namespace isodelta
