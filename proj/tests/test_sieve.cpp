#include <gtest/gtest.h>

#include <cmath>

#include "qhalo/nelder_mead.hpp"
#include "qhalo/sieve.hpp"

using namespace qhalo;

namespace {

SimParams with_D(double D) {
    SimParams p;
    p.D = D;
    return p;
}

}  // namespace

TEST(NelderMead, FindsRosenbrockMinimum) {
    optim::NelderMeadOptions opt;
    opt.x_tol = 1e-9;
    opt.f_tol = 1e-18;
    opt.max_iterations = 10000;
    const auto r = optim::nelder_mead<2>(
        [](const optim::Point<2>& v) { return 100.0 * std::pow(v[1] - v[0] * v[0], 2) + std::pow(1.0 - v[0], 2); },
        {-1.2, 1.0}, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-7);
    EXPECT_NEAR(r.x[1], 1.0, 1e-7);
}

TEST(NelderMead, ReportsNonConvergence) {
    optim::NelderMeadOptions opt;
    opt.max_iterations = 3;
    const auto r = optim::nelder_mead<2>([](const optim::Point<2>& v) { return v[0] * v[0] + v[1] * v[1]; }, {5.0, 5.0}, opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 3u);
}

TEST(Sieve, RecoversOptimalSqueezing) {
    for (double tau : {kPi / 4, kPi / 2, 1.0, kPi, 2.0 * kPi})
        for (double D : {0.01, 0.1}) {
            const SimParams p = with_D(D);
            const SieveResult r = sieve_minimize(tau, p);
            EXPECT_TRUE(r.converged);
            EXPECT_LT(std::abs(r.C_star - optimal_squeezing(tau, p)), 1e-6) << "tau=" << tau << " D=" << D;
            EXPECT_NEAR(r.S_min, von_neumann_entropy(evolve_special(tau, p).dm), 1e-12);
        }
}

TEST(Sieve, MinimumLiesBelowNearbyStates) {
    const SimParams p = with_D(0.05);
    const SieveResult r = sieve_minimize(2.0, p);
    for (Complex dC : {Complex(0.05, 0.0), Complex(-0.05, 0.0), Complex(0.0, 0.05), Complex(0.0, -0.05)})
        EXPECT_GT(entropy_of_initial(SqueezeParam(r.C_star + dC), 2.0, p), r.S_min);
}

TEST(Sieve, TranslatedObjectiveAgreesWithCentered) {
    const SimParams p = with_D(0.05);
    for (Complex C : {Complex(1.0, 0.0), Complex(0.7, 0.9)})
        EXPECT_NEAR(entropy_of_translated_initial(SqueezeParam(C), {2.0, -1.0}, 1.7, p),
                    entropy_of_initial(SqueezeParam(C), 1.7, p), 1e-12);
}

TEST(Sieve, RejectsFlatObjective) {
    EXPECT_THROW(sieve_minimize(1.0, with_D(0.0)), std::invalid_argument);
    EXPECT_THROW(sieve_minimize(0.0, with_D(0.1)), std::invalid_argument);
}

TEST(Sieve, TimeAveragedStaysNearCoherentOverPeriods) {
    const SimParams p = with_D(0.01);
    const SieveResult r = sieve_minimize_time_averaged(4.0 * kPi, 16, p);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.C_star - 1.0), 0.1);
}

TEST(CoherentEntropy, TwoLnTwoAnchor) {
    EXPECT_DOUBLE_EQ(coherent_entropy(1, 2.0 / kPi), 2.0 * std::log(2.0));
    EXPECT_NEAR(coherent_entropy(2, 1.0 / kPi), 2.0 * std::log(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(coherent_entropy(3, 0.0), 0.0);
    EXPECT_THROW(coherent_entropy(0, 0.1), std::invalid_argument);
}

TEST(Superselection, MarginIsDOmegaT) {
    const auto ok = superselection_valid(0.01, 1.0, SimParams{});
    EXPECT_TRUE(ok.valid);
    EXPECT_DOUBLE_EQ(ok.margin, 0.01);
    EXPECT_FALSE(superselection_valid(0.1, 2.0, SimParams{}).valid);
}

TEST(SieveScan, ArgminNearOptimalSqueezing) {
    const SimParams p = with_D(0.05);
    const double t = kPi / 2;
    const ScanRange re{0.5, 1.1, 61};
    const ScanRange im{0.3, 0.9, 61};
    const EntropySurface one = sieve_scan(t, p, re, im, 1);
    const EntropySurface two = sieve_scan(t, p, re, im, 2);
    EXPECT_EQ(one.S, two.S);  // job count does not change results
    EXPECT_LT(std::abs(one.argmin() - optimal_squeezing(t, p)), 0.015);
}
