#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "anisoflow/errors.hpp"
#include "anisoflow/grid.hpp"
#include "test_support.hpp"

using namespace anisoflow;
using testsupport::random_field;
using testsupport::random_vector_field;

TEST(Grid, RejectsDegenerateSpecs) {
    EXPECT_THROW(GridSpec(0, 3, 0.1, 0.1), DomainError);
    EXPECT_THROW(GridSpec(3, 3, 0.0, 0.1), DomainError);
    EXPECT_THROW(GridSpec(3, 3, 0.1, -1.0), DomainError);
}

TEST(Grid, ExtentMatchesCountsAndSpacing) {
    GridSpec g(7, 5, 0.125, 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(g.extent_x(), 1.0);
    EXPECT_DOUBLE_EQ(g.extent_y(), 1.0);
    GridSpec u = GridSpec::unit_square(9, 4);
    EXPECT_DOUBLE_EQ(u.hx(), 0.1);
    EXPECT_DOUBLE_EQ(u.extent_x(), 1.0);
    EXPECT_LT(u.extent_y(), 1.0);
}

TEST(Grid, ReadsOutsideInteriorAreZero) {
    GridSpec g(3, 2, 1.0, 1.0);
    ScalarField f(g, 5.0);
    EXPECT_EQ(f.at(-1, 0), 0.0);
    EXPECT_EQ(f.at(3, 1), 0.0);
    EXPECT_EQ(f.at(0, 2), 0.0);
    EXPECT_EQ(f.at(2, 1), 5.0);
}

TEST(Grid, ConstantFieldGradientLivesOnBoundaryCells) {
    GridSpec g(3, 3, 0.5, 0.5);
    VectorField d = grad(ScalarField(g, 1.0));
    EXPECT_DOUBLE_EQ(d.at(-1, 1).x, 2.0);
    EXPECT_DOUBLE_EQ(d.at(2, 1).x, -2.0);
    EXPECT_DOUBLE_EQ(d.at(0, 1).x, 0.0);
    EXPECT_DOUBLE_EQ(d.at(1, -1).y, 2.0);
    EXPECT_DOUBLE_EQ(d.at(1, 1).y, 0.0);
}

TEST(Grid, SpikeLaplacianIsFivePointStencil) {
    GridSpec g(5, 5, 0.5, 0.25);
    ScalarField spike(g);
    spike(2, 2) = 1.0;
    ScalarField lap = laplacian(spike);
    EXPECT_DOUBLE_EQ(lap(2, 2), -2.0 / 0.25 - 2.0 / 0.0625);
    EXPECT_DOUBLE_EQ(lap(1, 2), 4.0);
    EXPECT_DOUBLE_EQ(lap(3, 2), 4.0);
    EXPECT_DOUBLE_EQ(lap(2, 1), 16.0);
    EXPECT_DOUBLE_EQ(lap(2, 3), 16.0);
    EXPECT_DOUBLE_EQ(lap(1, 1), 0.0);
    ScalarField dg = div(grad(spike));
    for (std::size_t k = 0; k < lap.size(); ++k) EXPECT_NEAR(dg[k], lap[k], 1e-12);
}

TEST(Grid, InnerProductOfOnes) {
    GridSpec g(2, 2, 0.5, 0.5);
    ScalarField one(g, 1.0);
    EXPECT_DOUBLE_EQ(inner_l2(one, one), 1.0);
}

TEST(Grid, RayleighQuotientOfFirstModeIsDiscreteEigenvalue) {
    GridSpec g(7, 5, 0.125, 1.0 / 6.0);
    ScalarField f(g);
    const double pi = std::numbers::pi;
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 7; ++i) f(i, j) = std::sin(pi * (i + 1) / 8.0) * std::sin(pi * (j + 1) / 6.0);
    VectorField d = grad(f);
    const double rq = inner_l2(d, d) / inner_l2(f, f);
    // direct summation with mpmath
    EXPECT_NEAR(rq, 19.389590766075712648604483463, 1e-11);
    EXPECT_NEAR(discrete_dirichlet_eigenvalue(g), 19.389590766075712648604483463, 1e-11);
}

TEST(Grid, AdjointnessOnRandomFields) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        GridSpec g(2 + trial % 7, 2 + trial % 5, 0.3, 0.2);
        ScalarField f = random_field(g, rng);
        VectorField v = random_vector_field(g, rng);
        const double gap = inner_l2(grad(f), v) + inner_l2(f, div(v));
        EXPECT_LE(std::abs(gap), 1e-12 * norm_l2(f) * norm_l2(v));
    }
}

TEST(Grid, AdjointnessOnFiveByFourMatchesDirectSums) {
    std::mt19937_64 rng(17);
    GridSpec g(5, 4, 0.2, 0.25);
    ScalarField f = random_field(g, rng);
    VectorField v = random_vector_field(g, rng);
    // naive oracle: forward differences with explicit zero padding
    double lhs = 0.0;
    for (int j = -1; j < 4; ++j) {
        for (int i = -1; i < 5; ++i) {
            const double dx = (f.at(i + 1, j) - f.at(i, j)) / 0.2;
            const double dy = (f.at(i, j + 1) - f.at(i, j)) / 0.25;
            lhs += (dx * v.at(i, j).x + dy * v.at(i, j).y) * 0.05;
        }
    }
    EXPECT_NEAR(inner_l2(grad(f), v), lhs, 1e-13 * (1.0 + std::abs(lhs)));
    EXPECT_LE(std::abs(lhs + inner_l2(f, div(v))), 1e-12 * norm_l2(f) * norm_l2(v));
}

TEST(Grid, ZeroExtensionLeavesInteriorUnchanged) {
    std::mt19937_64 rng(5);
    GridSpec small(4, 3, 0.1, 0.1);
    GridSpec big(6, 5, 0.1, 0.1);
    ScalarField f = random_field(small, rng);
    ScalarField F(big);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 4; ++i) F(i + 1, j + 1) = f(i, j);
    ScalarField lf = laplacian(f), lF = laplacian(F);
    VectorField gf = grad(f), gF = grad(F);
    ScalarField df = div(gf), dF = div(gF);
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 4; ++i) {
            EXPECT_DOUBLE_EQ(lf(i, j), lF(i + 1, j + 1));
            EXPECT_DOUBLE_EQ(df(i, j), dF(i + 1, j + 1));
        }
    }
    for (int j = -1; j < 3; ++j)
        for (int i = -1; i < 4; ++i) EXPECT_EQ(gf.at(i, j), gF.at(i + 1, j + 1));
}

TEST(Grid, LpNormOfRandomFieldMatchesDirectSum) {
    std::mt19937_64 rng(9);
    GridSpec g(4, 3, 0.25, 0.2);
    VectorField v = random_vector_field(g, rng);
    double direct = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) direct += std::pow(std::hypot(v[k].x, v[k].y), 3.0) * 0.05;
    EXPECT_NEAR(norm_lp(v, 3.0), direct, 1e-14);
    EXPECT_NEAR(norm_lp_rooted(v, 3.0), std::cbrt(direct), 1e-14);
    EXPECT_THROW(norm_lp(v, 0.5), DomainError);
}

TEST(Grid, PairwiseSumIsExactOnIntegers) {
    std::vector<double> terms(1000);
    for (int k = 0; k < 1000; ++k) terms[k] = k;
    EXPECT_EQ(pairwise_sum(terms), 499500.0);
    EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(Grid, ShapeMismatchIsRejected) {
    ScalarField a(GridSpec(3, 3, 0.1, 0.1)), b(GridSpec(3, 4, 0.1, 0.1));
    EXPECT_THROW(inner_l2(a, b), ShapeError);
    EXPECT_THROW(a += b, ShapeError);
}

TEST(Grid, CenterSpikeOnThreeByThree) {
    GridSpec g(3, 3, 1.0, 1.0);
    ScalarField f(g);
    f(1, 1) = 1.0;
    ScalarField lap = laplacian(f);
    EXPECT_EQ(lap(1, 1), -4.0);
    EXPECT_EQ(lap(0, 1), 1.0);
    EXPECT_EQ(lap(2, 1), 1.0);
    EXPECT_EQ(lap(1, 0), 1.0);
    EXPECT_EQ(lap(1, 2), 1.0);
    EXPECT_EQ(lap(0, 0), 0.0);
    EXPECT_EQ(laplacian(ScalarField(g)), ScalarField(g));
}

TEST(Grid, FirstModeIsLaplacianEigenvector) {
    GridSpec g(9, 6, 0.1, 1.0 / 7.0);
    ScalarField f(g);
    const double pi = std::numbers::pi;
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 9; ++i) f(i, j) = std::sin(pi * (i + 1) / 10.0) * std::sin(pi * (j + 1) / 7.0);
    const double lam = discrete_dirichlet_eigenvalue(g);
    ScalarField lap = laplacian(f);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(lap[k], -lam * f[k], 1e-11);
}

TEST(Grid, SingleCellNormAndSymmetry) {
    GridSpec g(1, 1, 1.0, 1.0);
    VectorField v(g);
    v.set(0, 0, {3.0, 4.0});
    EXPECT_DOUBLE_EQ(norm_lp(v, 2.0), 25.0);
    EXPECT_DOUBLE_EQ(norm_lp(v, 2.0), inner_l2(v, v));
    std::mt19937_64 rng(2);
    GridSpec h(6, 4, 0.2, 0.3);
    ScalarField a = random_field(h, rng), b = random_field(h, rng);
    EXPECT_EQ(inner_l2(a, b), inner_l2(b, a));
    EXPECT_EQ(inner_l2(ScalarField(h), b), 0.0);
}
