#include <gtest/gtest.h>

#include <cmath>

#include "qhalo/oracle.hpp"
#include "qhalo/oracle_matrix.hpp"
#include "qhalo/propagator.hpp"

using namespace qhalo;

namespace {

SimParams with_D(double D) {
    SimParams p;
    p.D = D;
    return p;
}

const GridSpec kGrid{0.0, 9.0, 128};

}  // namespace

TEST(PropagateNumeric, GroundStateReturnsAfterFullPeriod) {
    const SimParams p = with_D(0.0);
    const NumericDM g = position_dm_grid(make_coherent(0.0, 0.0, p), kGrid, p);
    const NumericDM back = oracle::propagate_numeric_composed(g, 2.0 * kPi, p);
    EXPECT_LT(grid_distance(g, back), 1e-6);
}

TEST(PropagateNumeric, AgreesWithClosedForm) {
    const SimParams p = with_D(0.05);
    const SqueezeParam sq(Complex(2.0, 0.5));
    const NumericDM out = oracle::propagate_numeric(position_dm_grid(make_squeezed(sq, p), kGrid, p), 1.0, p);
    EXPECT_LT(grid_distance(out, position_dm_grid(evolve_squeezed(sq, 1.0, p), kGrid, p)), 1e-4);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-6);
}

TEST(PropagateNumeric, DisplacedStateWithNonUnitScales) {
    SimParams p = with_D(0.02);
    p.mass = 2.0;
    p.hbar = 0.5;
    const double ell = p.length_scale();
    const GaussianDM dm = make_coherent(1.5 * ell, -1.0 * p.momentum_scale(), p);
    const GridSpec grid{0.0, 10.0 * ell, 144};
    const NumericDM out = oracle::propagate_numeric(position_dm_grid(dm, grid, p), 1.2, p);
    EXPECT_LT(grid_distance(out, position_dm_grid(evolve(dm, 1.2, p), grid, p)), 1e-4);
}

TEST(PropagateNumeric, SemigroupWithinTolerance) {
    const SimParams p = with_D(0.1);
    const NumericDM g = position_dm_grid(make_squeezed(SqueezeParam(0.7, 0.3), p), kGrid, p);
    const NumericDM once = oracle::propagate_numeric(g, 1.0, p);
    const NumericDM twice = oracle::propagate_numeric(oracle::propagate_numeric(g, 0.5, p), 0.5, p);
    EXPECT_LT(grid_distance(once, twice), 2e-4);
}

TEST(PropagateNumeric, RejectsSingularAndUnderResolvedGrids) {
    const SimParams p = with_D(0.05);
    const NumericDM g = position_dm_grid(make_coherent(0.0, 0.0, p), kGrid, p);
    EXPECT_THROW(oracle::propagate_numeric(g, kPi, p), std::domain_error);
    const GridSpec coarse{0.0, 9.0, 64};
    EXPECT_THROW(oracle::propagate_numeric(position_dm_grid(make_coherent(0.0, 0.0, p), coarse, p), 0.2, p),
                 NumericalError);
    const GridSpec narrow{0.0, 3.0, 128};
    EXPECT_THROW(oracle::propagate_numeric(position_dm_grid(make_coherent(0.0, 0.0, p), narrow, p), 1.0, p),
                 NumericalError);
}

TEST(GridEntropy, PureStateHasZeroEntropy) {
    const SimParams p;
    const auto spec = oracle::grid_entropy(position_dm_grid(make_squeezed(SqueezeParam(1.5, -0.4), p), kGrid, p));
    EXPECT_NEAR(spec.entropy, 0.0, 1e-9);
    EXPECT_NEAR(spec.eigenvalues.front(), 1.0, 1e-10);
}

TEST(GridEntropy, ThermalStateHasGeometricSpectrum) {
    // n̄ = 1: eigenvalues 2^−(k+1)
    const SimParams p;
    const GridSpec grid{0.0, 12.0, 200};
    const auto spec = oracle::grid_entropy(position_dm_grid(GaussianDM{1.0 / 3.0, 3.0, 0.0, 0.0, 0.0}, grid, p));
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(spec.eigenvalues[k], std::ldexp(1.0, -static_cast<int>(k) - 1), 1e-9);
    EXPECT_NEAR(spec.entropy, 2.0 * std::log(2.0), 1e-7);
}

TEST(HermiteFunctions, OrthonormalOnGrid) {
    SimParams p;
    p.mass = 3.0;
    const GridSpec grid{0.0, 12.0 * p.length_scale(), 256};
    const Eigen::MatrixXd phi = oracle::hermite_functions(grid, 12, p);
    const Eigen::MatrixXd gram = phi.transpose() * phi * grid.step();
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FockSuperposition, TraceAndMeanPosition) {
    const SimParams p;
    const NumericDM dm = oracle::fock_superposition_dm(kGrid, p);
    EXPECT_NEAR(dm.trace().real(), 1.0, 1e-10);
    double mean = 0.0;
    for (std::size_t i = 0; i < kGrid.points; ++i)
        mean += kGrid.at(i) * dm.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() * kGrid.step();
    EXPECT_NEAR(mean, 1.0 / std::sqrt(2.0), 1e-10);
    const Eigen::MatrixXcd e = oracle::energy_representation(dm, 2, p);
    EXPECT_NEAR(std::abs(e(0, 1)), 0.5, 1e-10);
}

TEST(LorentzOracle, StaticLimitAndAbsorptionSign) {
    const oracle::LorentzModel m{0.5, 1.0, 0.5};
    EXPECT_NEAR(m.re(0.0), 1.5, 1e-15);
    EXPECT_NEAR(m.im(0.0), 0.0, 1e-15);
    for (double w : {0.1, 1.0, 10.0}) EXPECT_GT(m.im(w), 0.0);
    EXPECT_NEAR(m.im(1.0), 0.5 / 0.5, 1e-15);
    const auto t = oracle::lorentz_KK_oracle(0.5, 1.0, 0.5, {0.5, 2.0});
    EXPECT_EQ(t.re_K.size(), 2u);
    EXPECT_DOUBLE_EQ(t.re_K[1], m.re(2.0));
    EXPECT_THROW(oracle::lorentz_KK_oracle(-1.0, 1.0, 0.5, {1.0}), std::invalid_argument);
}

TEST(OracleMatrix, SmallMatrixPasses) {
    oracle::MatrixOptions opt;
    opt.states = {Complex(1.0, 0.0)};
    opt.phases = {1.0};
    opt.dissipation = {0.0, 0.1};
    opt.half_width = 9.0;
    opt.points = 128;
    const auto rep = oracle::run_matrix(opt);
    ASSERT_EQ(rep.cases.size(), 4u);
    EXPECT_TRUE(rep.all_pass());
    EXPECT_FALSE(rep.any_numerical_failure());
}

TEST(OracleMatrix, CoarseGridIsNumericalFailure) {
    oracle::MatrixOptions opt;
    opt.states = {Complex(1.0, 0.0)};
    opt.phases = {0.2};
    opt.dissipation = {0.0};
    opt.include_cat = false;
    opt.points = 64;
    const auto rep = oracle::run_matrix(opt);
    EXPECT_TRUE(rep.any_numerical_failure());
    EXPECT_FALSE(rep.all_pass());
}
