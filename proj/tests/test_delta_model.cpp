#include <gtest/gtest.h>

#include <cmath>

#include "isodelta/delta_model.hpp"
#include "isodelta/spectral_verifier.hpp"
#include "isodelta/susy_core.hpp"
#include "test_support.hpp"

using namespace isodelta;
namespace t = isodelta::testing;

TEST(DeltaCoupling, RejectsNonAttractive) {
    EXPECT_THROW(DeltaCoupling(0.0), InvalidInput);
    EXPECT_THROW(DeltaCoupling(1.0), InvalidInput);
    EXPECT_THROW(DeltaCoupling(NAN), InvalidInput);
    EXPECT_NO_THROW(DeltaCoupling(-1.0));
}

TEST(GroundState, ValueAndEnergy) {
    const DeltaCoupling g(-1.0);
    EXPECT_NEAR(ground_state_delta(g, 0.0), std::sqrt(0.5), 1e-15);
    EXPECT_DOUBLE_EQ(bound_energy(g), -0.25);
    EXPECT_DOUBLE_EQ(bound_energy(DeltaCoupling(-2.0)), -1.0);
    for (double gv : {-0.5, -1.0, -2.0}) {
        const DeltaCoupling gg(gv);
        const double mass = t::simpson([&](double x) { return std::pow(ground_state_delta(gg, x), 2); },
                                       0.0, 80.0 / -gv, 20000);
        EXPECT_NEAR(2.0 * mass, 1.0, 1e-10);
    }
}

TEST(CumulativeI, MatchesQuadratureOracle) {
    const DeltaCoupling g(-1.0);
    EXPECT_EQ(cumulative_I(g, 0.0), 0.5);
    EXPECT_NEAR(cumulative_I(g, 1.0), 1.0 - std::exp(-1.0) / 2.0, 1e-15);
    auto rho = [&](double x) { return std::pow(ground_state_delta(g, x), 2); };
    for (double x : {-7.0, -1.5, -0.1, 0.3, 1.0, 4.0}) {
        const double oracle = x < 0 ? t::simpson(rho, -60.0, x, 20000)
                                    : 0.5 + t::simpson(rho, 0.0, x, 20000);
        EXPECT_NEAR(cumulative_I(g, x), oracle, 1e-10) << "x=" << x;
    }
}

TEST(CumulativeI, PropertyMonotoneAndBounded) {
    for (int trial = 0; trial < 500; ++trial) {
        const DeltaCoupling g(t::uniform(-4.0, -0.1));
        const double a = t::uniform(-20.0, 20.0), b = t::uniform(-20.0, 20.0);
        const double lo = std::min(a, b), hi = std::max(a, b);
        EXPECT_LE(cumulative_I(g, lo), cumulative_I(g, hi));
        EXPECT_GE(cumulative_I(g, lo), 0.0);
        EXPECT_LE(cumulative_I(g, hi), 1.0);
    }
}

TEST(IsoTail, LargeConstantIsSmall) {
    const DeltaCoupling g(-1.0);
    for (double x = -10.0; x <= 10.0; x += 0.37) EXPECT_LE(std::abs(iso_tail(g, 1e4, x)), 2e-4) << x;
}

TEST(IsoTail, MatchesDirectFormula) {
    // tail = -4 psi0 psi0' / (C + I) + 2 psi0^4 / (C + I)^2, with psi0 and I written out.
    for (double gv : {-0.5, -1.0, -2.0}) {
        const DeltaCoupling g(gv);
        for (double C : {0.00001, 0.10001, 1.10001, 5.10001, -1.4, -3.0}) {
            for (double x : {-6.0, -1.1, -0.2, 0.25, 0.9, 5.0}) {
                const double p = std::sqrt(-gv / 2.0) * std::exp(gv * std::abs(x) / 2.0);
                const double dp = 0.5 * gv * (x > 0 ? 1.0 : -1.0) * p;
                const double u = C + (x < 0 ? 0.5 * std::exp(gv * std::abs(x))
                                            : 1.0 - 0.5 * std::exp(gv * std::abs(x)));
                const double direct = -4.0 * p * dp / u + 2.0 * std::pow(p, 4) / (u * u);
                EXPECT_NEAR(iso_tail(g, C, x), direct, 1e-10 * std::max(1.0, std::abs(direct)))
                    << "g=" << gv << " C=" << C << " x=" << x;
            }
        }
    }
}

TEST(IsoTail, JumpAtOriginUsesSides) {
    const DeltaCoupling g(-1.0);
    const double left = iso_tail(g, 1.0, 0.0, Side::Left);
    const double right = iso_tail(g, 1.0, 0.0, Side::Right);
    EXPECT_NE(left, right);
    EXPECT_NEAR(iso_tail(g, 1.0, 0.0), 0.5 * (left + right), 1e-15);
    EXPECT_NEAR(iso_tail(g, 1.0, -1e-12), left, 1e-9);
    EXPECT_NEAR(iso_tail(g, 1.0, 1e-12), right, 1e-9);
}

TEST(IsoTail, PoleRaisesSingular) {
    const DeltaCoupling g(-1.0);
    const double pole = std::log(5.0);
    try {
        // Exactly at the closed-form pole the denominator rounds to (nearly) zero.
        const double v = iso_tail(g, -0.9, pole);
        EXPECT_GT(std::abs(v), 1e10);
    } catch (const Singular& e) {
        EXPECT_NEAR(e.x(), pole, 1e-15);
    }
    EXPECT_THROW(iso_tail(g, -0.5, 0.0, Side::Right), Singular);
}

TEST(IsoWavefunction, ContinuousAtOriginAndNormalized) {
    for (double gv : {-0.5, -1.0, -2.0}) {
        const DeltaCoupling g(gv);
        for (double C : {0.00001, 0.5, 1.0, 5.0, -1.5, -4.0}) {
            EXPECT_NEAR(iso_wavefunction(g, C, 0.0, true, Side::Left),
                        iso_wavefunction(g, C, 0.0, true, Side::Right), 1e-12);
            const double L = 80.0 / -gv;
            auto sq = [&](double x) { return std::pow(iso_wavefunction(g, C, x, true), 2); };
            const double mass = t::simpson(sq, -L, 0.0, 200000) + t::simpson(sq, 0.0, L, 200000);
            EXPECT_NEAR(mass, 1.0, 1e-6) << "g=" << gv << " C=" << C;
            auto un = [&](double x) { return std::pow(iso_wavefunction(g, C, x, false), 2); };
            const double raw = t::simpson(un, -L, 0.0, 200000) + t::simpson(un, 0.0, L, 200000);
            EXPECT_NEAR(raw, 1.0 / (C * (C + 1.0)), 1e-6 / (C * (C + 1.0))) << "g=" << gv << " C=" << C;
        }
    }
}

TEST(IsoWavefunction, EqualsGroundStateOverDenominator) {
    const DeltaCoupling g(-1.0);
    for (double C : {0.1, 1.0, -2.0})
        for (double x : {-3.0, -0.4, 0.7, 2.5})
            EXPECT_NEAR(std::abs(iso_wavefunction(g, C, x, false)),
                        std::abs(ground_state_delta(g, x) / (C + cumulative_I(g, x))), 1e-13);
}

TEST(IsoWavefunction, ForbiddenNormalizationThrows) {
    EXPECT_THROW(iso_wavefunction(DeltaCoupling(-1.0), -0.5, 1.0, true), ForbiddenParameter);
    EXPECT_THROW(iso_wavefunction(DeltaCoupling(-1.0), 0.0, 1.0, true), ForbiddenParameter);
}

TEST(Classification, Examples) {
    EXPECT_EQ(classify_parameter(5.10001).classification, ParameterClass::Normalizable);
    EXPECT_EQ(classify_parameter(0.0).classification, ParameterClass::Pursey);
    EXPECT_EQ(classify_parameter(-1.0).classification, ParameterClass::AbrahamMoses);
    EXPECT_EQ(classify_parameter(-0.9).classification, ParameterClass::ForbiddenBand);
    EXPECT_EQ(classify_parameter(-0.9).band, SingularBand::PositiveSideBand);
    EXPECT_EQ(classify_parameter(-0.5).band, SingularBand::PositiveSideBand);
    EXPECT_EQ(classify_parameter(-0.3).band, SingularBand::NegativeSideBand);
    EXPECT_EQ(classify_parameter(-1.4).band, SingularBand::None);
}

TEST(Singularities, PositiveSidePoleAtLogFive) {
    const DeltaCoupling g(-1.0);
    const auto grid = Grid::symmetric(25.0, 5001);
    const auto report = singularity_scan(g, -0.9, grid);
    ASSERT_EQ(report.locations.size(), 1u);
    EXPECT_EQ(report.locations[0].half_line, Side::Right);
    const auto brute = t::scan_poles(-1.0, -0.9, 25.0, 1e-3, true);
    ASSERT_EQ(brute.size(), 1u);
    EXPECT_NEAR(report.locations[0].x, brute[0], 1e-10);
    EXPECT_NEAR(report.locations[0].x, std::log(5.0), 1e-10);
    EXPECT_TRUE(t::scan_poles(-1.0, -0.9, 25.0, 1e-3, false).empty());
}

TEST(Singularities, NegativeSidePole) {
    const DeltaCoupling g(-1.0);
    const auto report = singularity_scan(g, -0.3, Grid::symmetric(25.0, 5001));
    ASSERT_EQ(report.locations.size(), 1u);
    EXPECT_EQ(report.locations[0].half_line, Side::Left);
    EXPECT_NEAR(report.locations[0].x, -std::log(1.0 / 0.6), 1e-10);
    const auto brute = t::scan_poles(-1.0, -0.3, 25.0, 1e-3, false);
    ASSERT_EQ(brute.size(), 1u);
    EXPECT_NEAR(report.locations[0].x, brute[0], 1e-10);
}

TEST(Singularities, RegularConstantsHaveNone) {
    const auto grid = Grid::symmetric(25.0, 5001);
    for (double C : {1.0, 0.00001, 5.10001, -1.4, -1.0001})
        EXPECT_TRUE(singularity_scan(DeltaCoupling(-1.0), C, grid).locations.empty()) << C;
}

TEST(Singularities, PropertyAgreesWithBruteForceScan) {
    for (int trial = 0; trial < 300; ++trial) {
        const double gv = t::uniform(-3.0, -0.2);
        const double C = t::uniform(-1.6, 0.6);
        const double L = 20.0;
        const auto report = singularity_scan(DeltaCoupling(gv), C, Grid::symmetric(L, 2001));
        const auto pos = t::scan_poles(gv, C, L, 1e-3, true);
        const auto neg = t::scan_poles(gv, C, L, 1e-3, false);
        std::size_t pos_found = 0, neg_found = 0;
        for (const auto& loc : report.locations) {
            const auto& ref = loc.half_line == Side::Right ? pos : neg;
            ASSERT_FALSE(ref.empty()) << "g=" << gv << " C=" << C;
            EXPECT_NEAR(loc.x, ref[0], 1e-9);
            (loc.half_line == Side::Right ? pos_found : neg_found)++;
        }
        // A brute-force root closer than one step to the wall may be missed by the scan.
        EXPECT_EQ(pos_found, pos.size()) << "g=" << gv << " C=" << C;
        EXPECT_EQ(neg_found, neg.size()) << "g=" << gv << " C=" << C;
        // Any pole implies C is in the singular band, and vice versa.
        EXPECT_EQ(!report.locations.empty(), singular_band(C) != SingularBand::None);
    }
}

TEST(Singularities, BandSweepOverForbiddenRange) {
    const auto grid = Grid::symmetric(25.0, 5001);
    for (double C = -0.99; C < 0.0; C += 0.01) {
        const auto report = singularity_scan(DeltaCoupling(-1.0), C, grid);
        ASSERT_EQ(report.locations.size(), 1u) << C;
        EXPECT_EQ(report.locations[0].half_line, C <= -0.5 ? Side::Right : Side::Left) << C;
    }
}

TEST(SampledFamily, PolesRejectedOrFlagged) {
    const DeltaCoupling g(-1.0);
    const auto grid = Grid::symmetric(25.0, 5001);
    EXPECT_THROW(sample_iso_tail(g, -0.9, grid), SingularFamilyMember);
    const auto tail = sample_iso_tail(g, -0.9, grid, true);
    const auto pole = grid.nearest(std::log(5.0));
    EXPECT_TRUE(tail.is_singular(pole));
    EXPECT_FALSE(tail.is_singular(0));
    EXPECT_TRUE(std::isnan(tail[pole]));
    const auto psi = sample_iso_wavefunction(g, -0.9, grid, false, true);
    EXPECT_TRUE(psi.is_singular(pole));
}

TEST(SampledFamily, OriginCarriesBothLimits) {
    const DeltaCoupling g(-1.0);
    const auto grid = Grid::symmetric(25.0, 5001);
    const auto member = family_member(g, 1.0, grid);
    const auto o = *grid.origin_index();
    EXPECT_EQ(member.delta_strength, -1.0);
    EXPECT_EQ(member.tail.left(o), iso_tail(g, 1.0, 0.0, Side::Left));
    EXPECT_EQ(member.tail.right(o), iso_tail(g, 1.0, 0.0, Side::Right));
    EXPECT_NEAR(origin_jump(member.tail), iso_tail(g, 1.0, 0.0, Side::Right) - iso_tail(g, 1.0, 0.0, Side::Left),
                1e-15);
}

TEST(DualRoute, ClosedFormSuperpotentialsAgree) {
    // -(ln psi_iso)' against W0 + psi0^2/(C + I), both evaluated in closed form.
    for (double gv : {-0.5, -1.0, -2.0}) {
        const DeltaCoupling g(gv);
        for (double C : {0.00001, 0.10001, 1.10001, 5.10001, -1.4}) {
            for (double x : {-4.0, -0.6, 0.3, 3.0}) {
                const double h = 1e-5;
                const double dlog = (std::log(std::abs(iso_wavefunction(g, C, x + h, false))) -
                                     std::log(std::abs(iso_wavefunction(g, C, x - h, false)))) /
                                    (2.0 * h);
                const double W0 = -0.5 * gv * (x > 0 ? 1.0 : -1.0);
                const double p = ground_state_delta(g, x);
                const double W1 = W0 + p * p / (C + cumulative_I(g, x));
                EXPECT_NEAR(-dlog / W1, 1.0, 1e-6) << "g=" << gv << " C=" << C << " x=" << x;
            }
        }
    }
}

TEST(DualRoute, NumericFamilyMatchesClosedForm) {
    const auto grid = Grid::symmetric(25.0, 50001);
    const double h = grid.spacing();
    for (double C : {0.10001, 1.10001, 5.10001}) {
        const DeltaCoupling g(-1.0);
        const auto psi0 = sample_ground_state(g, grid);
        const auto fam = isospectral_family_potential(sample(grid, [](double) { return 0.0; }), psi0,
                                                      IsoParameter::of(C), SupportLine::FullLine);
        const auto closed = sample_iso_tail(g, C, grid);
        EXPECT_LT(max_abs_difference(fam.potential, closed,
                                     [&](std::size_t i) { return std::abs(grid.x(i)) > 2.5 * h && std::abs(grid.x(i)) < 15.0; }),
                  1e-6)
            << C;
    }
}

TEST(Eigenfunction, FamilyGroundStateSolvesMemberEquation) {
    // -psi'' + tail psi = E psi off the origin, psi'(0+) - psi'(0-) = g psi(0).
    for (double gv : {-0.5, -1.0, -2.0}) {
        const DeltaCoupling g(gv);
        const auto grid = Grid::symmetric(50.0 / -gv, 20001);
        const double h = grid.spacing();
        for (double C : {0.00001, 0.10001, 1.10001, 5.10001, -1.4}) {
            const auto member = family_member(g, C, grid);
            const auto psi = sample_iso_wavefunction(g, C, grid, true);
            const auto r = eigenfunction_residual(member, psi, bound_energy(g));
            const double curvature = std::max(1.0, max_abs(member.tail));
            EXPECT_LE(r.ode_residual, 10.0 * h * h * curvature * curvature) << "g=" << gv << " C=" << C;
            EXPECT_LE(r.jump_residual, 10.0 * h * h * curvature) << "g=" << gv << " C=" << C;
        }
    }
}

TEST(NormLaw, SampledStatesAcrossCouplings) {
    for (double gv : {-0.5, -1.0, -2.0}) {
        const DeltaCoupling g(gv);
        const auto grid = Grid::symmetric(60.0 / -gv, 60001);
        for (double C : {0.5, 1.0, 5.0}) {
            const auto un = sample_iso_wavefunction(g, C, grid, false);
            EXPECT_NEAR(integrate(un * un), 1.0 / (C * (C + 1.0)), 1e-6) << "g=" << gv << " C=" << C;
            const auto nz = sample_iso_wavefunction(g, C, grid, true);
            EXPECT_NEAR(integrate(nz * nz), 1.0, 1e-6) << "g=" << gv << " C=" << C;
        }
    }
}
