#pragma once

// Supersymmetric factorization machinery on sampled functions.
//
// Sign convention used throughout: W = -(ln psi0)', A = d/dx + W annihilates psi0,
// A^dagger = -d/dx + W, V1 = W^2 - W' + e0 and the partner V2 = W^2 + W' + e0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <limits>
#include <vector>

#include "isodelta/calculus.hpp"
#include "isodelta/errors.hpp"
#include "isodelta/grid.hpp"
#include "isodelta/parameter.hpp"
#include "isodelta/potential.hpp"

namespace isodelta {

/// Lower limit of the integrals in the family formulas: x_min stands in for -infinity
/// on the full line, the half-line starts at x = 0.
enum class SupportLine { FullLine, HalfLine };

inline std::size_t support_start(const Grid& grid, SupportLine support) {
    if (support == SupportLine::FullLine) return 0;
    const auto o = grid.origin_index();
    if (!o) throw InvalidInput("half-line support needs a grid node at x = 0");
    return *o;
}

inline GridFunction cumulative_integral(const GridFunction& f, SupportLine support) {
    return cumulative_from(f, support_start(f.grid(), support));
}

/// Integral of f from the support start to x_max.
inline double support_integral(const GridFunction& f, SupportLine support) {
    return cumulative_integral(f, support)[f.size() - 1];
}

/// Copy of f with the given nodes (and their break limits) replaced by NaN and flagged.
inline GridFunction flag_singular(const GridFunction& f, const std::vector<std::size_t>& nodes) {
    if (nodes.empty()) return f;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> v(f.values().begin(), f.values().end());
    std::vector<Break> breaks = f.breaks();
    std::vector<std::size_t> singular = f.singular_nodes();
    for (auto i : nodes) {
        v[i] = nan;
        singular.push_back(i);
        for (auto& b : breaks)
            if (b.index == i) b.left = b.right = nan;
    }
    return GridFunction(f.grid(), std::move(v), std::move(breaks), std::move(singular));
}

/// Adjacent node pairs where d vanishes or changes sign.
inline std::vector<Bracket> sign_change_brackets(const GridFunction& d) {
    std::vector<Bracket> out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.left(i) == 0.0 || d.right(i) == 0.0) {
            out.push_back({i, i, d.x(i), d.x(i)});
            continue;
        }
        if (i + 1 < d.size() && d.right(i) * d.left(i + 1) < 0.0)
            out.push_back({i, i + 1, d.x(i), d.x(i + 1)});
    }
    return out;
}

inline std::vector<std::size_t> bracket_nodes(const std::vector<Bracket>& brackets) {
    std::vector<std::size_t> nodes;
    for (const auto& b : brackets) {
        nodes.push_back(b.lo);
        nodes.push_back(b.hi);
    }
    return nodes;
}

/// W = -psi0'/psi0. psi0 must be strictly positive.
inline GridFunction superpotential_from_ground_state(const GridFunction& psi0) {
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        if (!(psi0.left(i) > 0.0) || !(psi0.right(i) > 0.0))
            throw InvalidInput("ground state must be positive; node " + std::to_string(i) +
                               " at x=" + std::to_string(psi0.x(i)));
    }
    return -(derivative(psi0) / psi0);
}

/// f0 = exp(-2 * integral of W0), equal to 1 at the support start.
inline GridFunction integration_factor(const GridFunction& W0, SupportLine support) {
    const GridFunction exponent = -2.0 * cumulative_integral(W0, support);
    constexpr double kMaxExponent = 700.0;
    for (std::size_t i = 0; i < exponent.size(); ++i) {
        if (std::max(exponent.left(i), exponent.right(i)) > kMaxExponent)
            throw OverflowError("integration factor exceeds exp(700) at x=" +
                                std::to_string(exponent.x(i)));
    }
    return map(exponent, [](double e) { return std::exp(e); });
}

/// General solution of W' = -W^2 + V2 built on the particular solution W0:
/// W1 = W0 + f0 / (C + integral of f0).
///
/// On the full line f0 is scaled to unit mass, i.e. f0 = psi0^2 for the normalized
/// ground state, so C has the same meaning as in the family formulas. On the half line
/// f0 keeps f0(0) = 1.
inline GridFunction general_riccati_superpotential(const GridFunction& W0, IsoParameter C,
                                                   SupportLine support,
                                                   bool allow_singular = false) {
    GridFunction f0 = integration_factor(W0, support);
    if (support == SupportLine::FullLine) f0 = (1.0 / integrate(f0)) * f0;
    const GridFunction denom = cumulative_integral(f0, support) + C.C;
    const auto brackets = sign_change_brackets(denom);
    if (!brackets.empty() && !allow_singular) throw SingularFamilyMember(C.C, brackets);
    const auto nodes = bracket_nodes(brackets);
    return W0 + flag_singular(f0, nodes) / flag_singular(denom, nodes);
}

/// W' + W^2 - V2.
inline GridFunction riccati_residual(const GridFunction& W, const GridFunction& V2) {
    return derivative(W) + W * W - V2;
}

/// A psi = psi' + W psi.
inline GridFunction apply_annihilation(const GridFunction& W, const GridFunction& psi) {
    return derivative(psi) + W * psi;
}

/// A^dagger psi = -psi' + W psi.
inline GridFunction apply_creation(const GridFunction& W, const GridFunction& psi) {
    return -derivative(psi) + W * psi;
}

/// H = A^dagger A + e0 built on the superpotential W.
struct FactorizationFrame {
    GridFunction W;
    double e0{};
};

/// V1 = W^2 - W' + e0 (smooth part).
inline GridFunction factorized_potential(const FactorizationFrame& frame) {
    return frame.W * frame.W - derivative(frame.W) + frame.e0;
}

/// V2 = W^2 + W' + e0 (smooth part).
inline GridFunction partner_potential(const FactorizationFrame& frame) {
    return frame.W * frame.W + derivative(frame.W) + frame.e0;
}

/// Partner potential including the delta term produced by a jump of W at x = 0:
/// W' contains jump * delta(x), so V2 carries +jump * delta(x).
inline SingularPotential singular_partner(const FactorizationFrame& frame) {
    return {origin_jump(frame.W), partner_potential(frame)};
}

/// Factorized potential with its delta term (-jump * delta(x)).
inline SingularPotential singular_factorized(const FactorizationFrame& frame) {
    return {-origin_jump(frame.W), factorized_potential(frame)};
}

/// N_iso = sqrt(C (C + 1)); only defined for normalizable C.
inline double normalization_constant(IsoParameter C) {
    if (!C.normalizable()) throw ForbiddenParameter(C.C, C.classification);
    return std::sqrt(C.C * (C.C + 1.0));
}

namespace detail {

struct NormalizedState {
    GridFunction psi;
    double input_norm;
    bool renormalized;
};

inline NormalizedState normalized_ground_state(const GridFunction& psi0, SupportLine support) {
    constexpr double kNormTolerance = 1e-6;
    const double norm = support_integral(psi0 * psi0, support);
    if (!(norm > 0.0)) throw InvalidInput("ground state has zero norm");
    if (std::abs(norm - 1.0) <= kNormTolerance) return {psi0, norm, false};
    std::clog << "isodelta: warning: ground state norm " << norm << " renormalized to 1\n";
    return {(1.0 / std::sqrt(norm)) * psi0, norm, true};
}

}  // namespace detail

/// One member of the strictly isospectral family, with diagnostics.
struct FamilyPotential {
    /// V1 - 4 psi0 psi0' / (C + I) + 2 psi0^4 / (C + I)^2.
    GridFunction potential;
    /// V1 - 2 (ln(C + I))''.
    GridFunction log_form;
    /// max |potential - log_form| over regular nodes.
    double form_discrepancy{};
    double input_norm{};
    bool renormalized{};
    std::vector<Bracket> singular_brackets;
};

inline FamilyPotential isospectral_family_potential(const GridFunction& V1_tail,
                                                    const GridFunction& psi0, IsoParameter C,
                                                    SupportLine support,
                                                    bool allow_singular = false) {
    if (C.classification == ParameterClass::ForbiddenBand && !allow_singular)
        throw ForbiddenParameter(C.C, C.classification);
    auto [psi, norm, renormalized] = detail::normalized_ground_state(psi0, support);

    const GridFunction raw_denom = cumulative_integral(psi * psi, support) + C.C;
    auto brackets = sign_change_brackets(raw_denom);
    if (!brackets.empty() && !allow_singular) throw SingularFamilyMember(C.C, brackets);
    const GridFunction denom = flag_singular(raw_denom, bracket_nodes(brackets));

    const GridFunction psi_d = derivative(psi);
    const GridFunction psi2 = psi * psi;
    GridFunction expanded =
        V1_tail - 4.0 * (psi * psi_d) / denom + 2.0 * (psi2 * psi2) / (denom * denom);
    const GridFunction log_denom = map(denom, [](double d) { return std::log(std::abs(d)); });
    GridFunction log_form = V1_tail - 2.0 * second_derivative(log_denom);
    const double discrepancy = max_abs_difference(expanded, log_form);
    return {std::move(expanded), std::move(log_form), discrepancy, norm, renormalized,
            std::move(brackets)};
}

/// psi0 / (C + I), multiplied by N_iso when `normalized` is set.
inline GridFunction isospectral_ground_state(const GridFunction& psi0, IsoParameter C,
                                             SupportLine support, bool normalized,
                                             bool allow_singular = false) {
    const double scale = normalized ? normalization_constant(C) : 1.0;
    const auto state = detail::normalized_ground_state(psi0, support);
    const GridFunction raw_denom = cumulative_integral(state.psi * state.psi, support) + C.C;
    const auto brackets = sign_change_brackets(raw_denom);
    if (!brackets.empty() && !allow_singular) throw SingularFamilyMember(C.C, brackets);
    return scale * (state.psi / flag_singular(raw_denom, bracket_nodes(brackets)));
}

}  // namespace isodelta
