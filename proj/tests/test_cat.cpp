#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qhalo/cat.hpp"

using namespace qhalo;

namespace {

SimParams with_D(double D) {
    SimParams p;
    p.D = D;
    return p;
}

// compare two cat states pointwise on a few scaled points
double max_difference(const CatDM& x, const CatDM& y) {
    double d = 0.0;
    for (double a : {-2.0, -0.7, 0.0, 0.4, 1.3, 2.5})
        for (double b : {-1.9, -0.3, 0.0, 0.8, 2.2}) d = std::max(d, std::abs(x(a, b) - y(a, b)));
    return d;
}

const CatSpec kWide{1.0, 1.0, {2.0, 0.0}, {-2.0, 0.0}};

}  // namespace

TEST(Separation, ScaledDistanceSquaredOverTwo) {
    SimParams p;
    p.mass = 2.0;
    p.hbar = 0.5;
    const double ell = p.length_scale();
    const double pscale = p.momentum_scale();
    const CatSpec cat{1.0, 1.0, {ell, 0.0}, {-ell, 2.0 * pscale}};
    EXPECT_NEAR(separation(cat, p), 0.5 * (4.0 + 4.0), 1e-14);
    EXPECT_NEAR(separation(fig1_cat(p), p), 2.0, 1e-14);
}

TEST(DecoherenceTime, InverseOfExcessSeparation) {
    SimParams p = with_D(0.1);
    const double x = std::sqrt(22.0) / 2.0;  // Δ² = 11
    const auto td = decoherence_time(CatSpec{1.0, 1.0, {x, 0.0}, {-x, 0.0}}, p);
    ASSERT_TRUE(td.has_value());
    EXPECT_NEAR(*td, 1.0, 1e-13);
    EXPECT_FALSE(decoherence_time(kWide, with_D(0.0)).has_value());
    EXPECT_FALSE(decoherence_time(CatSpec{1.0, 1.0, {0.5, 0.0}, {-0.5, 0.0}}, p).has_value());
}

TEST(CatStroboscopic, ZeroPeriodsIsInitialState) {
    const SimParams p = with_D(0.2);
    EXPECT_LT(max_difference(cat_dm_stroboscopic(kWide, 0, p), cat_dm_initial(kWide, p)), 1e-14);
}

TEST(CatStroboscopic, NoDissipationReturnsEveryPeriod) {
    const SimParams p = with_D(0.0);
    const CatSpec cat{Complex(1.0, 0.3), 0.5, {1.0, 0.5}, {-1.0, 2.0}};
    for (int n : {1, 2, 5}) EXPECT_LT(max_difference(cat_dm_stroboscopic(cat, n, p), cat_dm_initial(cat, p)), 1e-13);
}

TEST(CatStroboscopic, AgreesWithGeneralPropagation) {
    for (const CatSpec& cat : {kWide, CatSpec{Complex(1.0, 0.3), 0.5, {1.0, 0.5}, {-1.0, 2.0}},
                               CatSpec{1.0, Complex(0.0, 1.0), {0.0, 1.5}, {0.5, -1.0}}})
        for (double D : {0.01, 0.1})
            for (int n : {1, 3}) {
                const SimParams p = with_D(D);
                EXPECT_LT(max_difference(cat_dm_stroboscopic(cat, n, p), cat_dm_general(cat, 2.0 * kPi * n, p)), 1e-10)
                    << "D=" << D << " n=" << n;
            }
}

TEST(CatDM, HermitianWithUnitTrace) {
    const SimParams p = with_D(0.05);
    const CatSpec cat{Complex(1.0, 0.3), 0.5, {1.0, 0.5}, {-1.0, 2.0}};
    for (const CatDM& dm : {cat_dm_initial(cat, p), cat_dm_stroboscopic(cat, 2, p), cat_dm_general(cat, 1.7, p)}) {
        EXPECT_NEAR(std::abs(dm.trace() - 1.0), 0.0, 1e-12);
        for (double a : {-1.0, 0.3, 2.0})
            for (double b : {-0.5, 1.1}) EXPECT_NEAR(std::abs(dm(a, b) - std::conj(dm(b, a))), 0.0, 1e-14);
    }
}

TEST(CatDM, GridSampleMatchesTrace) {
    const SimParams p = with_D(0.05);
    const NumericDM g = position_dm_grid(cat_dm_stroboscopic(kWide, 1, p), GridSpec{0.0, 10.0, 161}, p);
    EXPECT_NEAR(g.trace().real(), 1.0, 1e-10);
    EXPECT_LT(g.hermiticity_error(), 1e-14);
}

TEST(Visibility, ClosedFormDecay) {
    // cross-block peak ratio at n periods: exp(−nπDΔ²/(1 + 2nπD))
    const SimParams p = with_D(0.02);
    const double d2 = separation(kWide, p);
    EXPECT_NEAR(visibility(cat_dm_initial(kWide, p)), 1.0, 1e-14);
    double last = 1.0;
    for (int n = 1; n <= 4; ++n) {
        const double v = visibility(cat_dm_stroboscopic(kWide, n, p));
        const double L = 1.0 + 2.0 * n * kPi * 0.02;
        EXPECT_NEAR(v, std::exp(-n * kPi * 0.02 * d2 / L), 1e-13);
        EXPECT_LT(v, last);
        last = v;
    }
}

TEST(Visibility, GridEstimateCloseToAnalytic) {
    const SimParams p = with_D(0.05);
    const CatDM dm = cat_dm_stroboscopic(kWide, 1, p);
    EXPECT_NEAR(visibility(dm, GridSpec{0.0, 6.0, 241}, p), visibility(dm), 1e-3);
}

TEST(Visibility, TranslationAndBranchSwapInvariant) {
    const SimParams p = with_D(0.03);
    const CatSpec moved{1.0, 1.0, {3.0, 1.0}, {-1.0, 1.0}};
    const CatSpec swapped{1.0, 1.0, kWide.s2, kWide.s1};
    const double v = visibility(cat_dm_stroboscopic(kWide, 2, p));
    EXPECT_NEAR(visibility(cat_dm_stroboscopic(moved, 2, p)), v, 1e-13);
    EXPECT_NEAR(visibility(cat_dm_stroboscopic(swapped, 2, p)), v, 1e-13);
}

TEST(Visibility, FitRecoversClosedFormRate) {
    const SimParams p = with_D(0.005);
    const double x = std::sqrt(10.0);  // Δ² = 20
    const auto fit = fit_visibility_decay(CatSpec{1.0, 1.0, {x, 0.0}, {-x, 0.0}}, p);
    ASSERT_EQ(fit.t.size(), 5u);
    // least-squares slope of nπDΔ²/(1 + 2nπD) against t = 2nπ, done by hand
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (int n = 1; n <= 5; ++n) {
        const double t = 2.0 * kPi * n;
        const double y = n * kPi * 0.005 * 20.0 / (1.0 + 2.0 * n * kPi * 0.005);
        st += t, sy += y, stt += t * t, sty += t * y;
    }
    EXPECT_NEAR(fit.rate, (5.0 * sty - st * sy) / (5.0 * stt - st * st), 1e-12);
    EXPECT_LT(fit.rate, 0.005 * 20.0 / 2.0);
    EXPECT_THROW(fit_visibility_decay(kWide, p, 3, 3), std::invalid_argument);
}

TEST(HaloRadius, ScalesAsInverseRoot) {
    EXPECT_NEAR(halo_radius(1.0, with_D(0.04)), 10.0, 1e-13);
    EXPECT_NEAR(halo_radius(4.0, with_D(0.04)), 5.0, 1e-13);
    EXPECT_EQ(halo_radius(1.0, with_D(0.0)), std::numeric_limits<double>::infinity());
    EXPECT_THROW(halo_radius(0.0, with_D(0.1)), std::invalid_argument);
}

TEST(FockDemo, CoherenceSurvivesInsideHalo) {
    const SimParams p;
    const GridSpec grid{0.0, 9.0, 128};
    const FockDemo d0 = halo_demo_fock(0, 0.01, p, grid);
    EXPECT_NEAR(d0.retention, 1.0, 1e-12);
    EXPECT_NEAR(d0.amplitude_ratio, 1.0, 1e-12);
    const FockDemo d1 = halo_demo_fock(1, 0.01, p, grid);
    EXPECT_GT(d1.retention, 0.99);
    EXPECT_LT(d1.amplitude_ratio, 1.0);
    EXPECT_GT(d1.amplitude_ratio, 0.9);
    EXPECT_NEAR(d1.final_state.trace().real(), 1.0, 1e-6);
}
