#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qhalo/gaussian.hpp"

using namespace qhalo;

TEST(SimParams, RejectsNonPhysicalValues) {
    SimParams p;
    EXPECT_NO_THROW(p.validate());
    p.D = -0.1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = SimParams{};
    p.omega = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = SimParams{};
    p.mass = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(SqueezeParam, RequiresPositiveRealPart) {
    EXPECT_NO_THROW(SqueezeParam(1.0, 5.0));
    EXPECT_THROW(SqueezeParam(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(SqueezeParam(-0.5, 0.0), std::invalid_argument);
}

TEST(GaussianDM, CoherentStateIsPureVacuumShape) {
    const SimParams p;
    const GaussianDM dm = make_coherent(1.5, -0.3, p);
    EXPECT_DOUBLE_EQ(purity(dm), 1.0);
    EXPECT_DOUBLE_EQ(von_neumann_entropy(dm), 0.0);
    EXPECT_DOUBLE_EQ(linear_entropy(dm), 0.0);
    const Eigen::Matrix2d v = covariance(dm);
    EXPECT_NEAR(v(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(v(1, 1), 0.5, 1e-15);
    EXPECT_NEAR(v(0, 1), 0.0, 1e-15);
}

TEST(GaussianDM, ValidationCatchesUncertaintyViolation) {
    EXPECT_THROW((GaussianDM{2.0, 1.0, 0.0, 0.0, 0.0}).validate(), std::invalid_argument);
    EXPECT_THROW((GaussianDM{0.0, 1.0, 0.0, 0.0, 0.0}).validate(), std::invalid_argument);
    EXPECT_NO_THROW((GaussianDM{0.5, 2.0, 0.3, 1.0, 1.0}).validate());
}

TEST(GaussianDM, OccupationAndEntropyOfThermalLadder) {
    // b/a = Λ² gives n̄ = (Λ − 1)/2; at n̄ = 1 the entropy is 2 ln 2
    const GaussianDM dm{1.0 / 3.0, 3.0, 0.0, 0.0, 0.0};
    EXPECT_NEAR(mean_occupation(dm), 1.0, 1e-15);
    EXPECT_NEAR(von_neumann_entropy(dm), 2.0 * std::log(2.0), 1e-15);
    EXPECT_NEAR(purity(dm), 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(entropy_from_occupation(0.0), 0.0);
}

TEST(GaussianDM, KernelRoundTripKeepsParameters) {
    SimParams p;
    p.mass = 2.5;
    p.omega = 0.7;
    p.hbar = 1.3;
    const GaussianDM dm{0.4, 1.7, -0.8, 0.9, -1.1};
    const GaussianDM back = GaussianDM::from_kernel(dm.to_kernel(p), p);
    EXPECT_NEAR(back.a, dm.a, 1e-14);
    EXPECT_NEAR(back.b, dm.b, 1e-14);
    EXPECT_NEAR(back.c, dm.c, 1e-14);
    EXPECT_NEAR(back.center_x, dm.center_x, 1e-14);
    EXPECT_NEAR(back.center_p, dm.center_p, 1e-14);
    EXPECT_NEAR(std::abs(dm.to_kernel(p).trace() - 1.0), 0.0, 1e-14);
}

TEST(GaussianDM, GridSampleHasUnitTraceAndMatchesPurity) {
    SimParams p;
    p.mass = 3.0;
    const GaussianDM dm{0.6, 1.9, 0.4, 0.5, 0.7};
    const NumericDM g = position_dm_grid(dm, p);
    EXPECT_NEAR(g.trace().real(), 1.0, 1e-10);
    EXPECT_NEAR(g.purity(), purity(dm), 1e-9);
    EXPECT_EQ(g.hermiticity_error(), 0.0);
}

TEST(GaussianDM, MomentumMeanFromGridMatchesCenter) {
    // ⟨P⟩ = −iħ ∂_Q ρ(Q, Q')|_{Q'=Q}, checked by finite difference of the sampled kernel
    const SimParams p;
    const GaussianDM dm{0.8, 1.6, 0.3, 0.4, 1.25};
    const GridSpec grid{0.4, 10.0, 801};
    const NumericDM g = position_dm_grid(dm, grid, p);
    const double h = grid.step();
    Complex mean = 0.0;
    for (Eigen::Index i = 1; i + 1 < g.rho.rows(); ++i)
        mean += Complex(0.0, -1.0) * (g.rho(i + 1, i) - g.rho(i - 1, i)) / (2.0 * h) * h;
    EXPECT_NEAR(mean.real(), 1.25, 1e-3);  // O(h²) difference error
}

TEST(Wigner, NormalizedAndPeakedAtCenter) {
    SimParams p;
    p.hbar = 0.5;
    const GaussianDM dm{0.7, 1.4, -0.2, 1.0, -2.0};
    const PhaseField w = wigner(dm, p);
    EXPECT_NEAR(w.integral(), 1.0, 1e-8);
    Eigen::Index i = 0, j = 0;
    w.values.maxCoeff(&i, &j);
    EXPECT_NEAR(w.grid.x.at(static_cast<std::size_t>(i)), 1.0, 2.0 * w.grid.x.step());
    EXPECT_NEAR(w.grid.p.at(static_cast<std::size_t>(j)), -2.0, 2.0 * w.grid.p.step());
}

TEST(GaussianDM, MultimodeEntropyIsAdditive) {
    const std::vector<GaussianDM> modes{{1.0 / 3.0, 3.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0, 0.0},
                                        {1.0 / 3.0, 3.0, 0.0, 1.0, 0.0}};
    EXPECT_NEAR(multimode_entropy(modes), 4.0 * std::log(2.0), 1e-14);
}

TEST(GridSpec, EnforcesMinimumPoints) {
    EXPECT_THROW((GridSpec{0.0, 1.0, 32}).validate(), std::invalid_argument);
    EXPECT_THROW((GridSpec{0.0, -1.0, 128}).validate(), std::invalid_argument);
    const GridSpec g{1.0, 2.0, 65};
    EXPECT_DOUBLE_EQ(g.at(0), -1.0);
    EXPECT_DOUBLE_EQ(g.at(64), 3.0);
}
