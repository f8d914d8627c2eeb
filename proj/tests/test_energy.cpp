#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anisoflow/energy.hpp"
#include "anisoflow/errors.hpp"
#include "test_support.hpp"

using namespace anisoflow;
using testsupport::random_field;

namespace {

ModelParams sample_params(double p = 3.0) {
    ModelParams m;
    m.kappa = 0.8;
    m.mu = 0.4;
    m.nu = 0.6;
    m.lambda = 1.7;
    m.p = p;
    m.tau = 0.05;
    m.t_final = 0.5;
    return m;
}

// Independent evaluation with explicit loops and zero padding.
double naive_energy(const ScalarField& alpha, const ScalarField& u, const ScalarField& u_org,
                    const ModelParams& m, const Anisotropy& a) {
    const GridSpec& g = u.grid();
    const double area = g.hx() * g.hy();
    double e = 0.0;
    for (int j = -1; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const double ax = (alpha.at(i + 1, j) - alpha.at(i, j)) / g.hx();
            const double ay = (alpha.at(i, j + 1) - alpha.at(i, j)) / g.hy();
            const double ux = (u.at(i + 1, j) - u.at(i, j)) / g.hx();
            const double uy = (u.at(i, j + 1) - u.at(i, j)) / g.hy();
            const double th = alpha.at(i, j);
            const double rx = std::cos(th) * ux - std::sin(th) * uy;
            const double ry = std::sin(th) * ux + std::cos(th) * uy;
            e += area * (0.5 * m.kappa * (ax * ax + ay * ay) +
                         m.nu / m.p * std::pow(std::sqrt(ux * ux + uy * uy), m.p) + gamma_eval(a, {rx, ry}));
        }
    }
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) e += area * 0.5 * m.lambda * std::pow(u(i, j) - u_org(i, j), 2);
    return e;
}

}  // namespace

TEST(Energy, ParamsValidation) {
    ModelParams m = sample_params();
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.steps(), 10);
    ModelParams bad = m;
    bad.p = 2.0;
    try {
        bad.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.assumption(), "A0");
        EXPECT_NE(std::string(e.what()).find("p > 2"), std::string::npos);
    }
    bad = m;
    bad.mu = 0.0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = m;
    bad.t_final = 0.33;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Energy, MatchesDirectSummation) {
    std::mt19937_64 rng(2);
    GridSpec g = GridSpec::unit_square(4, 4);
    for (const Anisotropy& a : {Anisotropy::smoothed_l1(0.2), Anisotropy::smoothed_ngon(4, 0.1),
                                Anisotropy::smoothed_euclid(0.3)}) {
        for (double p : {2.5, 3.0, 4.0}) {
            ModelParams m = sample_params(p);
            ScalarField alpha = random_field(g, rng), u = random_field(g, rng, 0, 1), uo = random_field(g, rng, 0, 1);
            EnergyBreakdown e = energy(alpha, u, uo, m, a);
            const double ref = naive_energy(alpha, u, uo, m, a);
            EXPECT_NEAR(e.total, ref, 1e-12 * std::abs(ref));
            EXPECT_NEAR(e.total, e.dirichlet_alpha + e.p_term + e.aniso_term + e.fidelity, 1e-13 * e.total);
        }
    }
}

TEST(Energy, GradAlphaMatchesDirectionalDerivative) {
    std::mt19937_64 rng(3);
    GridSpec g = GridSpec::unit_square(6, 5);
    const double eps = 1e-6;
    for (const Anisotropy& a : {Anisotropy::smoothed_l1(0.2), Anisotropy::smoothed_ngon(3, 0.1)}) {
        ModelParams m = sample_params();
        ScalarField alpha = random_field(g, rng), u = random_field(g, rng, 0, 1), uo = random_field(g, rng, 0, 1);
        ScalarField phi = random_field(g, rng);
        ScalarField ap = alpha, am = alpha;
        ap.axpy(eps, phi);
        am.axpy(-eps, phi);
        const double fd = (energy(ap, u, uo, m, a).total - energy(am, u, uo, m, a).total) / (2 * eps);
        const double an = inner_l2(grad_alpha(alpha, u, m, a), phi);
        EXPECT_NEAR(fd, an, 1e-5 * std::abs(an));
    }
}

TEST(Energy, GradAlphaIsDirichletTermForEuclid) {
    std::mt19937_64 rng(4);
    GridSpec g = GridSpec::unit_square(5, 5);
    Anisotropy a = Anisotropy::smoothed_euclid(0.1);
    ModelParams m = sample_params();
    ScalarField alpha = random_field(g, rng), u = random_field(g, rng, 0, 1);
    ScalarField ga = grad_alpha(alpha, u, m, a);
    ScalarField ref = -m.kappa * laplacian(alpha);
    for (std::size_t k = 0; k < ga.size(); ++k) EXPECT_NEAR(ga[k], ref[k], 1e-10 * (1 + std::abs(ref[k])));
    ScalarField g3 = grad_alpha(3.0 * alpha, u, m, a);
    for (std::size_t k = 0; k < ga.size(); ++k) EXPECT_NEAR(g3[k], 3.0 * ga[k], 1e-10 * (1 + std::abs(ga[k])));
}

TEST(Energy, GradUStepMatchesDirectionalDerivative) {
    std::mt19937_64 rng(5);
    GridSpec g = GridSpec::unit_square(6, 6);
    const double eps = 1e-6;
    for (double p : {2.5, 3.0, 4.0}) {
        Anisotropy a = Anisotropy::smoothed_ngon(4, 0.2);
        ModelParams m = sample_params(p);
        ScalarField alpha = random_field(g, rng), u = random_field(g, rng, 0, 1);
        StepData step{random_field(g, rng, 0, 1), random_field(g, rng, 0, 1)};
        ScalarField psi = random_field(g, rng);
        ScalarField up = u, um = u;
        up.axpy(eps, psi);
        um.axpy(-eps, psi);
        const double fd = (step_functional(alpha, up, step, m, a) - step_functional(alpha, um, step, m, a)) / (2 * eps);
        const double an = inner_l2(grad_u_step(alpha, u, step, m, a), psi);
        EXPECT_NEAR(fd, an, 1e-5 * std::abs(an));
    }
}

TEST(Energy, PseudoParabolicTermScalesWithMu) {
    std::mt19937_64 rng(6);
    GridSpec g = GridSpec::unit_square(5, 5);
    Anisotropy a = Anisotropy::smoothed_euclid(0.2);
    ModelParams m = sample_params();
    ScalarField alpha(g), u = random_field(g, rng, 0, 1);
    StepData step{random_field(g, rng, 0, 1), random_field(g, rng, 0, 1)};
    ModelParams m10 = m;
    m10.mu = 10 * m.mu;
    ScalarField diff = grad_u_step(alpha, u, step, m10, a) - grad_u_step(alpha, u, step, m, a);
    ScalarField ref = (-9.0 * m.mu / m.tau) * laplacian(u - step.w_bar);
    for (std::size_t k = 0; k < diff.size(); ++k) EXPECT_NEAR(diff[k], ref[k], 1e-9 * (1 + std::abs(ref[k])));
}

TEST(Energy, USliceIsConvex) {
    std::mt19937_64 rng(7);
    GridSpec g = GridSpec::unit_square(6, 6);
    Anisotropy a = Anisotropy::smoothed_l1(0.1);
    ModelParams m = sample_params();
    ScalarField alpha = random_field(g, rng);
    StepData step{random_field(g, rng, 0, 1), random_field(g, rng, 0, 1)};
    for (int k = 0; k < 20; ++k) {
        ScalarField u1 = random_field(g, rng, 0, 1), u2 = random_field(g, rng, 0, 1);
        const double lhs = step_functional(alpha, u2, step, m, a);
        const double rhs = step_functional(alpha, u1, step, m, a) +
                           inner_l2(grad_u_step(alpha, u1, step, m, a), u2 - u1);
        EXPECT_GE(lhs - rhs, -1e-12 * std::abs(lhs));
    }
}

TEST(Energy, StepFunctionalAddsPenalties) {
    std::mt19937_64 rng(8);
    GridSpec g = GridSpec::unit_square(4, 4);
    Anisotropy a = Anisotropy::smoothed_l1(0.1);
    ModelParams m = sample_params();
    ScalarField alpha = random_field(g, rng), u = random_field(g, rng, 0, 1);
    StepData step{random_field(g, rng, 0, 1), random_field(g, rng, 0, 1)};
    StepPenalty pen = step_penalty(u, step.w_bar, m);
    ScalarField d = u - step.w_bar;
    VectorField gd = grad(d);
    EXPECT_NEAR(pen.l2, inner_l2(d, d) / (2 * m.tau), 1e-14);
    EXPECT_NEAR(pen.h1, m.mu * inner_l2(gd, gd) / (2 * m.tau), 1e-12);
    EXPECT_NEAR(step_functional(alpha, u, step, m, a), energy(alpha, u, step.u_org, m, a).total + pen.l2 + pen.h1,
                1e-12);
}

TEST(Energy, UnitRangeCheckNamesAssumption) {
    GridSpec g = GridSpec::unit_square(3, 3);
    ScalarField f(g, 0.5);
    EXPECT_NO_THROW(require_unit_range(f, "A1", "u_org"));
    f(1, 1) = 1.5;
    try {
        require_unit_range(f, "A1", "u_org");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.assumption(), "A1");
    }
}
